#include "meshpatch/sampler.hpp"
#include "meshpatch/shapes.hpp"
#include "meshpatch/simplify.hpp"
#include "test_util.hpp"

#include <omp.h>

#include <cstring>

using namespace meshpatch;

namespace {

bool same_bits(const SampledFeatures& a, const SampledFeatures& b) {
  if (a.points.size() != b.points.size()) return false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    const PointFeature &p = a.points[i], &q = b.points[i];
    if (std::memcmp(p.position.data(), q.position.data(), sizeof(double) * 3) != 0 ||
        std::memcmp(p.normal.data(), q.normal.data(), sizeof(double) * 3) != 0 ||
        std::memcmp(&p.jacobian, &q.jacobian, sizeof(double)) != 0 || p.source.face != q.source.face)
      return false;
  }
  return true;
}

class ThreadCount : public ::testing::TestWithParam<int> {
 protected:
  void SetUp() override {
    saved_ = omp_get_max_threads();
    omp_set_num_threads(GetParam());
  }
  void TearDown() override { omp_set_num_threads(saved_); }

 private:
  int saved_ = 1;
};

}  // namespace

TEST_P(ThreadCount, SamplingMatchesSerial) {
  const SimplificationTrace t = simplify_to(shapes::torus(1.0, 0.35, 24, 16), 160, 3);
  const SubdividedTopology topo = subdivide(t.coarse, 3);
  for (int k : {1, 16}) {
    SelectionConfig cfg;
    cfg.k = k;
    cfg.seed = 21;
    EXPECT_TRUE(same_bits(sample_mesh_features(t, topo, cfg), serial::sample_mesh_features(t, topo, cfg)))
        << "k=" << k;
  }
}

TEST_P(ThreadCount, VoronoiMatchesSerial) {
  for (const auto& nm : shapes::builtin_suite()) {
    const auto a = mixed_voronoi_areas(nm.mesh), b = serial::mixed_voronoi_areas(nm.mesh);
    ASSERT_EQ(a.size(), b.size());
    EXPECT_EQ(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)), 0) << nm.name;
  }
}

INSTANTIATE_TEST_SUITE_P(Threads, ThreadCount, ::testing::Values(1, 2, 8));
