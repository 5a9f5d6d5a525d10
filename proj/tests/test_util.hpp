#pragma once

#include "meshpatch/common.hpp"
#include "meshpatch/mesh.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <string>

namespace meshpatch::testing {

/// Runs `fn` and checks that it throws meshpatch::Error with `code`.
template <typename Fn>
void expect_error(ErrorCode code, Fn&& fn) {
  try {
    fn();
    ADD_FAILURE() << "expected " << to_string(code) << ", nothing thrown";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), code) << e.what();
  }
}

/// Two triangles sharing only vertex 0.
inline IndexedMesh bowtie() {
  IndexedMesh m;
  m.vertices = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(-1, 0, 0), Vec3(-1, -1, 0)};
  m.faces = {{0, 1, 2}, {0, 3, 4}};
  return m;
}

/// Fresh empty directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("meshpatch_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace meshpatch::testing
