#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "kwe/io.hpp"

namespace fs = std::filesystem;

namespace {

fs::path workdir() {
  const fs::path d = fs::temp_directory_path() / "kwe_unit_cli";
  fs::create_directories(d);
  return d;
}

int invoke(const std::string& args) {
  const std::string cmd = std::string(KWE_CLI_PATH) + " " + args + " 2>/dev/null";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

fs::path write_config(const std::string& name, const std::string& extra) {
  const fs::path d = workdir();
  const fs::path p = d / name;
  std::ofstream o(p);
  o << "[grid]\nv_max = 2\nn_v = 5\nn_polar = 2\nn_azimuthal = 4\n"
    << "[solver]\ndt = 0.1\nt_end = 0.3\n"
    << "[output]\ndirectory = " << d.string() << "\nprefix = " << p.stem().string() << "\n"
    << extra;
  return p;
}

}  // namespace

TEST(Cli, ZeroInitialDataRunsClean) {
  const fs::path cfg = write_config("zero.ini", "[initial]\namplitude = 0\n");
  ASSERT_EQ(invoke("run -c " + cfg.string()), 0);
  const auto rows = kwe::read_csv((workdir() / "zero.csv").string());
  ASSERT_EQ(rows.size(), 4u);
  for (const auto& r : rows) {
    EXPECT_EQ(r.l1_xv, 0.0);
    EXPECT_EQ(r.mass, 0.0);
    EXPECT_EQ(r.energy, 0.0);
  }
  EXPECT_TRUE(fs::exists(workdir() / "zero_00003.bin"));
}

TEST(Cli, InvalidWeightsExitWithConfigCode) {
  const fs::path cfg = write_config("bad.ini", "[weights]\nM = 9\nalpha = 9\n");
  EXPECT_EQ(invoke("run -c " + cfg.string()), 2);
}

TEST(Cli, UnknownKeyAndMissingFile) {
  const fs::path cfg = write_config("typo.ini", "[solver]\npicard_tolerance = 1e-9\n");
  EXPECT_EQ(invoke("run -c " + cfg.string()), 2);
  EXPECT_EQ(invoke("run -c " + (workdir() / "nope.ini").string()), 2);
  EXPECT_EQ(invoke("frobnicate"), 2);
}
