#include <gtest/gtest.h>

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "domes/io.hpp"

using namespace domes;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(DOMES_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), pipe)) r.out.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string data(const std::string& name) { return std::string(DOMES_DATA_DIR) + "/" + name; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "domes_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, ReducePentagon) {
  const auto r = run("reduce --in " + data("regular_pentagon.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = parse_json_text(r.out);
  EXPECT_EQ(j["stats"]["k"], 2);
  EXPECT_EQ(j["stats"]["fixes"], 0);
  EXPECT_EQ(j["triangles"].size(), 1u);
}

TEST(Cli, ReduceRhombusIsIdentity) {
  const auto r = run("reduce --in " + data("rhombus.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = parse_json_text(r.out);
  EXPECT_EQ(j["stats"]["k"], 1);
  EXPECT_EQ(j["moves"].size(), 0u);
}

TEST(Cli, ReduceIntegerEdges) {
  const auto r = run("reduce --in " + data("integer_edges.json"));
  ASSERT_EQ(r.code, 0);
  const auto j = parse_json_text(r.out);
  EXPECT_EQ(j["stats"]["n"], 6);
  EXPECT_LE(j["stats"]["k"].get<int>(), j["stats"]["budget"].get<int>());
}

TEST(Cli, InputErrors) {
  EXPECT_EQ(run("reduce --in " + data("bad_edge.json")).code, 2);
  EXPECT_EQ(run("reduce --in " + data("malformed.json")).code, 2);
  EXPECT_EQ(run("reduce --in " + data("does_not_exist.json")).code, 2);
  EXPECT_EQ(run("validate --in " + data("malformed.json")).code, 2);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("reduce").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
  EXPECT_EQ(run("--help").code, 0);
}

TEST(Cli, ValidateFreshAndTamperedLedgers) {
  const auto ledger = scratch("pentagon_ledger.json");
  ASSERT_EQ(run("reduce --in " + data("regular_pentagon.json") + " --out " + ledger.string()).code, 0);
  const auto ok = run("validate --in " + ledger.string());
  EXPECT_EQ(ok.code, 0);
  EXPECT_TRUE(parse_json_text(ok.out)["ok"].get<bool>());

  auto j = parse_json_text(slurp(ledger));
  j["splits"][0]["apex"][2] = j["splits"][0]["apex"][2].get<double>() + 1e-3;
  const auto bad = scratch("tampered_ledger.json");
  write_text_file(bad.string(), dump(j));
  EXPECT_EQ(run("validate --in " + bad.string()).code, 1);
}

TEST(Cli, LedgerRoundTripIsByteIdentical) {
  const auto ledger = scratch("seeded_ledger.json");
  ASSERT_EQ(run("reduce --in " + data("integer_edges.json") + " --seed 99 --out " + ledger.string()).code, 0);
  const std::string first = slurp(ledger);
  EXPECT_EQ(parse_json_text(first)["stats"]["seed"], 99);
  const auto back = json_to_ledger(parse_json_text(first));
  EXPECT_EQ(dump(ledger_to_json(back.ledger, back.seed)), first);
}

TEST(Cli, OffExport) {
  const auto off = scratch("pentagon.off");
  ASSERT_EQ(run("reduce --in " + data("regular_pentagon.json") + " --off " + off.string()).code, 0);
  std::istringstream in(slurp(off));
  std::string header, comment;
  std::getline(in, header);
  std::getline(in, comment);
  EXPECT_EQ(header, "OFF");
  EXPECT_EQ(comment.rfind("# 1 unit triangles, 2 rhombi", 0), 0u);
  std::size_t nv = 0, nf = 0;
  in >> nv >> nf;
  EXPECT_EQ(nf, 5u);
}

TEST(Cli, ModuliCertificates) {
  const auto iso = run("moduli isotropy --surface antiprism_band:k=4 --trials 5 --seed 3");
  ASSERT_EQ(iso.code, 0);
  EXPECT_LE(parse_json_text(iso.out)["max_ratio"].get<double>(), 1e-8);

  const auto dims = run("moduli dims --surface polygon:k=4 --trials 3");
  ASSERT_EQ(dims.code, 0);
  for (const auto& row : parse_json_text(dims.out)["polygons"]) {
    EXPECT_EQ(row["tangent"], 5);
    EXPECT_EQ(row["moduli"], 2);
  }

  const auto rank = run("moduli rank --surface three_rhombus_pants --trials 3");
  ASSERT_EQ(rank.code, 0);
  EXPECT_TRUE(parse_json_text(rank.out)["certified"].get<bool>());

  EXPECT_EQ(run("moduli dims --surface klein_bottle").code, 2);
  EXPECT_EQ(run("moduli rank --surface pentagon_pants").code, 2);
  EXPECT_EQ(run("moduli isotropy --surface polygon:k=4").code, 2);
  EXPECT_EQ(run("moduli sideways").code, 2);
}

TEST(Cli, Census) {
  const auto r = run("census --n-min 6 --n-max 6 --samples 10 --seed 5");
  ASSERT_EQ(r.code, 0);
  std::istringstream in(r.out);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("n,k,", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    // Second column is k; bound for n = 6 is 36.
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    EXPECT_LE(std::stoi(line.substr(c1 + 1, c2 - c1 - 1)), 36) << line;
  }
  EXPECT_EQ(rows, 10);

  const auto empty = run("census --n-min 6 --n-max 6 --samples 0");
  ASSERT_EQ(empty.code, 0);
  EXPECT_EQ(std::count(empty.out.begin(), empty.out.end(), '\n'), 2);

  const auto fixture = run("census --n-min 7 --n-max 7 --samples 0 --pentagon-fixture");
  ASSERT_EQ(fixture.code, 0);
  std::istringstream fin(fixture.out);
  for (int i = 0; i < 3; ++i) std::getline(fin, line);
  EXPECT_EQ(line.rfind("5,2,", 0), 0u) << line;
}
