#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "qmetro/scenario.hpp"

using namespace qmetro;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("qmetro_cli_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string writeScenario(const TempDir& dir, const std::string& name,
                          const std::string& body) {
  const fs::path p = dir.path / name;
  std::ofstream out(p);
  out << body;
  return p.string();
}

std::vector<std::string> readLines(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(bool(in));
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  return cells;
}

// Line with the trailing wall_ms column removed.
std::string stripWall(const std::string& line) {
  return line.substr(0, line.rfind(','));
}

struct CsvRow {
  std::map<std::string, std::string> cells;
  double num(const std::string& key) const {
    return std::stod(cells.at(key));
  }
};

std::vector<CsvRow> readCsv(const fs::path& p) {
  const auto lines = readLines(p);
  REQUIRE(lines.size() >= 2);
  const auto header = split(lines[0]);
  std::vector<CsvRow> rows;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    REQUIRE(cells.size() == header.size());
    CsvRow row;
    for (std::size_t c = 0; c < header.size(); ++c) {
      row.cells[header[c]] = cells[c];
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

const char* kBasicScenario = R"({
  "name": "basic",
  "channel": {"kind": "decoherence", "strengths": [0.5]},
  "tasks": [
    {"probe": "ket0", "axes": "xy", "bounds": ["holevo", "nhb"]},
    {"probe": "ket0", "axes": "x", "bounds": ["sld"]},
    {"probe": "ket0", "axes": "xy", "bounds": ["nhb"], "copies": [2]},
    {"schemes": ["dc_1q_4outcome"]}
  ],
  "output": "basic.csv"
})";

}  // namespace

TEST_CASE("scenario run produces closed-form rows") {
  TempDir dir;
  const std::string file = writeScenario(dir, "basic.json", kBasicScenario);
  RunOptions opts;
  opts.outDir = dir.path.string();
  opts.workers = 2;
  CHECK(runScenarioFile(file, opts) == kExitOk);

  const auto lines = readLines(dir.path / "basic.csv");
  CHECK(lines[0] ==
        "channel,strength1,strength2,probe_id,n_params,M,bound_kind,value,"
        "v1,v2,v3,precision,gap,wall_ms");
  const auto rows = readCsv(dir.path / "basic.csv");
  REQUIRE(rows.size() == 5);

  // ket0, decoherence 0.5: holevo (4-2e)/(1-e)^2 = 12, nhb 4/(1-e)^2 = 16.
  CHECK(rows[0].cells.at("channel") == "decoherence");
  CHECK(rows[0].cells.at("probe_id") == "ket0");
  CHECK(rows[0].cells.at("bound_kind") == "holevo");
  CHECK(rows[0].num("strength1") == 0.5);
  CHECK(rows[0].num("n_params") == 2);
  CHECK(rows[0].num("M") == 1);
  CHECK(rows[0].num("value") == doctest::Approx(12.0).epsilon(1e-5));
  CHECK(rows[0].num("precision") ==
        doctest::Approx(2.0 / 12.0).epsilon(1e-5));
  CHECK(rows[1].cells.at("bound_kind") == "nhb");
  CHECK(rows[1].num("value") == doctest::Approx(16.0).epsilon(1e-5));

  // Single-parameter sld: 1/(1-e)^2 = 4.
  CHECK(rows[2].cells.at("bound_kind") == "sld");
  CHECK(rows[2].num("n_params") == 1);
  CHECK(rows[2].num("value") == doctest::Approx(4.0).epsilon(1e-5));

  // Two-copy scaled nhb: 2*(2-e+e^2/2)/(1-e)^2 = 13.
  CHECK(rows[3].num("M") == 2);
  CHECK(rows[3].num("value") == doctest::Approx(13.0).epsilon(1e-4));

  // Measurement-scheme row reports the asymptotic total.
  CHECK(rows[4].cells.at("bound_kind") == "dc_1q_4outcome");
  CHECK(rows[4].cells.at("probe_id") == "scheme");
  CHECK(rows[4].num("value") == doctest::Approx(16.0).epsilon(1e-8));
}

TEST_CASE("re-running a scenario is byte-identical except wall_ms") {
  TempDir dir;
  const std::string file = writeScenario(dir, "rep.json", R"({
    "name": "rep",
    "channel": {"kind": "phase_damping", "strengths": [0.2, 0.6]},
    "tasks": [
      {"probe": {"bell": 0}, "qubits": 2, "axes": "xy",
       "bounds": ["holevo", "nhb"]},
      {"probe": {"random": {"n": 3, "seed": 5}}, "axes": "xy",
       "bounds": ["holevo"]}
    ],
    "output": "rep.csv"
  })");
  RunOptions opts;
  opts.outDir = dir.path.string();
  CHECK(runScenarioFile(file, opts) == kExitOk);
  const auto first = readLines(dir.path / "rep.csv");
  CHECK(runScenarioFile(file, opts) == kExitOk);
  const auto second = readLines(dir.path / "rep.csv");
  REQUIRE(first.size() == second.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    CHECK(stripWall(first[i]) == stripWall(second[i]));
  }
}

TEST_CASE("certificates sidecar is written on request") {
  TempDir dir;
  const std::string file = writeScenario(dir, "cert.json", R"({
    "name": "cert",
    "channel": {"kind": "decoherence", "strengths": [0.4]},
    "tasks": [{"probe": "ket0", "axes": "xy", "bounds": ["holevo"]}],
    "output": "cert.csv"
  })");
  RunOptions opts;
  opts.outDir = dir.path.string();
  opts.certificates = true;
  CHECK(runScenarioFile(file, opts) == kExitOk);
  const auto lines = readLines(dir.path / "cert_certificates.json");
  std::string all;
  for (const auto& l : lines) all += l;
  // Two X operators, flattened as re,im pairs over a 2x2 matrix.
  CHECK(all.find("\"x_ops\"") != std::string::npos);
  CHECK(all.find("\"bound_kind\": \"holevo\"") != std::string::npos);
}

TEST_CASE("config errors exit with the config code") {
  TempDir dir;
  RunOptions opts;
  opts.outDir = dir.path.string();

  // Empty task list.
  CHECK(runScenarioFile(
            writeScenario(dir, "empty.json", R"({
              "name": "e",
              "channel": {"kind": "decoherence", "strengths": [0.5]},
              "tasks": []
            })"),
            opts) == kExitConfig);

  // Unknown top-level key.
  CHECK(runScenarioFile(
            writeScenario(dir, "unk.json", R"({
              "name": "u",
              "channel": {"kind": "decoherence", "strengths": [0.5]},
              "tasks": [{"probe": "ket0", "axes": "x", "bounds": ["sld"]}],
              "extra": 1
            })"),
            opts) == kExitConfig);

  // Unknown task key.
  CHECK(runScenarioFile(
            writeScenario(dir, "unk2.json", R"({
              "name": "u2",
              "channel": {"kind": "decoherence", "strengths": [0.5]},
              "tasks": [{"probe": "ket0", "axes": "x", "bounds": ["sld"],
                         "typo": true}]
            })"),
            opts) == kExitConfig);

  // Strength outside [0, 1].
  CHECK(runScenarioFile(
            writeScenario(dir, "rng.json", R"({
              "name": "r",
              "channel": {"kind": "decoherence", "strengths": [1.5]},
              "tasks": [{"probe": "ket0", "axes": "x", "bounds": ["sld"]}]
            })"),
            opts) == kExitConfig);

  // Malformed JSON.
  CHECK(runScenarioFile(writeScenario(dir, "bad.json", "{ not json"), opts) ==
        kExitConfig);

  // Missing file.
  CHECK(runScenarioFile((dir.path / "nope.json").string(), opts) ==
        kExitConfig);
}

TEST_CASE("bundled scenario files parse and reference valid schemas") {
  // Smoke-run the smallest bundled figure scenario end to end.
  const fs::path scenarios = fs::path(QMETRO_SOURCE_DIR) / "scenarios";
  REQUIRE(fs::exists(scenarios / "fig3.json"));
  int count = 0;
  for (const auto& entry : fs::directory_iterator(scenarios)) {
    if (entry.path().extension() == ".json") ++count;
  }
  CHECK(count >= 12);  // fig2 .. fig13
}
