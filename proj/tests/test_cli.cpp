// Copyright 2026 The tn-slicer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include <gtest/gtest.h>
#include <openssl/evp.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>

#include "json.hpp"

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(TN_SLICER_BIN) + " " + args + " 2>/dev/null";
  Run r;
  FILE* p = popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(TN_SLICER_DATA) + "/" + name; }

std::string lattice() {
  return "--net " + data("lattice_4x2.network.json") + " --path " + data("lattice_4x2.path.json");
}

std::string random18() {
  return "--net " + data("random_18.network.json") + " --path " + data("random_18.path.json");
}

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string bytes = ss.str();
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr);
  std::ostringstream os;
  for (unsigned i = 0; i < len; ++i) os << std::hex << std::setw(2) << std::setfill('0') << int(md[i]);
  return os.str();
}

nlohmann::json parse(const Run& r) { return nlohmann::json::parse(r.out); }

}  // namespace

TEST(Cli, CostOfLattice) {
  const auto r = run("cost " + lattice());
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["flops"], "164");
  EXPECT_EQ(j["log2_peak_rank"], 4);
  EXPECT_DOUBLE_EQ(j["overhead"].get<double>(), 1.0);
  EXPECT_EQ(j["inputs"]["net"]["sha256"], sha256_file(data("lattice_4x2.network.json")));
  EXPECT_EQ(j["inputs"]["path"]["sha256"], sha256_file(data("lattice_4x2.path.json")));
  EXPECT_TRUE(j.contains("version"));
  EXPECT_FALSE(j.contains("generated_at"));
}

TEST(Cli, SlicedCostOfLattice) {
  const auto j = parse(run("cost " + lattice() + " --slices e"));
  EXPECT_EQ(j["flops"], "200");
  EXPECT_DOUBLE_EQ(j["overhead"].get<double>(), 200.0 / 164.0);
}

TEST(Cli, SliceMeetsTarget) {
  const auto r = run("slice " + random18() + " --target 9");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_EQ(j["target_rank"], 9);
  EXPECT_LE(j["log2_peak_rank"].get<double>(), 9.0);
  EXPECT_GE(j["overhead"].get<double>(), 1.0);
  EXPECT_FALSE(j["indices"].empty());
}

TEST(Cli, ExitCodes) {
  EXPECT_EQ(run("cost --net /nonexistent.json --path /nonexistent.json").code, 2);
  EXPECT_EQ(run("slice " + lattice() + " --target 0").code, 2);
  EXPECT_EQ(run("cost " + lattice() + " --slices nosuchindex").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("refine " + lattice() + " --target 2 --alpha 1.5").code, 2);
  EXPECT_EQ(run("fuse " + lattice() + " --capacity 1").code, 3);
  EXPECT_EQ(run("--version").code, 0);
}

TEST(Cli, OtherSubcommandsProduceJson) {
  for (const char* sub : {"lifetimes", "stem", "fuse"}) {
    const auto r = run(std::string(sub) + " " + lattice());
    ASSERT_EQ(r.code, 0) << sub;
    EXPECT_NO_THROW(parse(r)) << sub;
  }
  const auto stem = parse(run("stem " + lattice()));
  EXPECT_EQ(stem["tensors"], nlohmann::json({4, 8, 9, 10, 11, 12, 13, 14}));
}

TEST(Cli, RefineIsDeterministicAcrossWorkers) {
  const std::string base = "refine " + random18() + " --target 9 --seed 5 --chains 4 --max-iters 40";
  const auto a = run(base + " --workers 1");
  const auto b = run(base + " --workers 4");
  const auto c = run(base + " --workers 1");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
  EXPECT_EQ(a.out, c.out);
}

TEST(Cli, ExecVerifyLine) {
  const auto r = run("exec " + random18() + " --target 9 --seed 3 --verify --workers 2");
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("overhead_measured == overhead_predicted: true\n"), std::string::npos);
  const auto j = nlohmann::json::parse(r.out.substr(r.out.find('{')));
  EXPECT_TRUE(j["flops_match"].get<bool>());
  EXPECT_TRUE(j["verify"]["within_tolerance"].get<bool>());
}

TEST(Cli, ExecIsBitwiseStableAcrossWorkers) {
  const std::string base = "exec " + random18() + " --target 8 --seed 11";
  const auto a = run(base + " --workers 1");
  const auto b = run(base + " --workers 3");
  ASSERT_EQ(a.code, 0);
  EXPECT_EQ(a.out, b.out);
}

TEST(Cli, FusedExec) {
  const std::string spanning =
      "--net " + data("spanning_10.network.json") + " --path " + data("spanning_10.path.json");
  const auto r = run("exec " + spanning + " --fused --capacity 5 --seed 2");
  ASSERT_EQ(r.code, 0);
  const auto j = parse(r);
  EXPECT_TRUE(j["flops_match"].get<bool>());
  EXPECT_EQ(j["fusion"]["groups"].size(), 1u);
}

TEST(Cli, OutFileAndTimestamps) {
  const auto path = std::filesystem::temp_directory_path() / "tn_slicer_cli_test.json";
  const auto r = run("cost " + lattice() + " --timestamps --out " + path.string());
  ASSERT_EQ(r.code, 0);
  EXPECT_TRUE(r.out.empty());
  std::ifstream in(path);
  const auto j = nlohmann::json::parse(in);
  EXPECT_TRUE(j.contains("generated_at"));
  std::filesystem::remove(path);
}

TEST(Cli, BenchAndAudit) {
  const auto bench = run("bench slicers --instances 6 --seed 1 --max-iters 20 --format csv");
  ASSERT_EQ(bench.code, 0);
  EXPECT_EQ(std::count(bench.out.begin(), bench.out.end(), '\n'), 7);
  const auto audit = run("audit theorem1 --instances 4 --seed 1");
  ASSERT_EQ(audit.code, 0);
  EXPECT_EQ(parse(audit)["instances"], 4);
}
