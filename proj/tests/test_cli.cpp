#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

#include "ilw/cli.hpp"
#include "ilw/io.hpp"
#include "oracles.hpp"

using namespace ilw;
namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "ilw_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct Outcome {
  int code;
  std::string err;
};

Outcome ilwsolve(const std::string& command, const fs::path& dir, const json& config,
                 const std::string& extra = "") {
  const fs::path cfg = dir / (command + ".json");
  std::ofstream(cfg) << config.dump(2);
  const fs::path err = dir / "stderr.txt";
  const std::string line = std::string(ILWSOLVE_PATH) + " " + command + " --quiet --config " + cfg.string() +
                           " --out " + (dir / "out").string() + " " + extra + " 2> " + err.string();
  const int status = std::system(line.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(err)};
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "out" / "manifest.json")); }

const json kIlwWave = {{"regime", "ILW"}, {"gamma", 0.8}, {"alpha", 1.2}, {"c", 0.52}, {"l", 64}, {"N", 1024}};

std::size_t data_rows(const fs::path& csv) {
  std::ifstream in(csv);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n - 1;
}

}  // namespace

TEST_CASE("help documents the exit codes") {
  const fs::path dir = scratch("help");
  const std::string line = std::string(ILWSOLVE_PATH) + " --help > " + (dir / "help.txt").string();
  CHECK(std::system(line.c_str()) == 0);
  const std::string help = slurp(dir / "help.txt");
  for (const char* s : {"Exit codes", "2  config error", "5  singular mode", "6  verify"}) {
    CHECK(help.find(s) != std::string::npos);
  }
}

TEST_CASE("evolve: missing gamma is a config error naming the key") {
  const fs::path dir = scratch("missing_gamma");
  const json cfg = {{"regime", "ILW"}, {"alpha", 1.2}, {"l", 8}, {"N", 64}, {"dt", 1e-3}, {"t_end", 0.1},
                    {"initial", {{"shape", "gaussian"}, {"amplitude", 0.1}, {"width", 1.0}}}};
  const Outcome o = ilwsolve("evolve", dir, cfg);
  CHECK(o.code == cli::kConfigError);
  CHECK(o.err.find("gamma") != std::string::npos);
}

TEST_CASE("evolve: other config errors") {
  const fs::path dir = scratch("bad_config");
  json cfg = {{"regime", "ILW"}, {"gamma", 0.8}, {"alpha", 1.2}, {"l", 8}, {"N", 64}, {"dt", 1.0}, {"t_end", 0.1},
              {"initial", {{"shape", "gaussian"}, {"amplitude", 0.1}, {"width", 1.0}}}};
  Outcome o = ilwsolve("evolve", dir, cfg);
  CHECK(o.code == cli::kConfigError);
  CHECK(o.err.find("'dt'") != std::string::npos);

  cfg["dt"] = 1e-3;
  cfg["initial"]["shape"] = "triangle";
  o = ilwsolve("evolve", dir, cfg);
  CHECK(o.code == cli::kConfigError);
  CHECK(o.err.find("initial.shape") != std::string::npos);

  cfg["initial"]["shape"] = "gaussian";
  cfg["N"] = 63;
  o = ilwsolve("evolve", dir, cfg);
  CHECK(o.code == cli::kConfigError);
  CHECK(o.err.find("'N'") != std::string::npos);
}

TEST_CASE("evolve: zero initial data gives zero snapshots") {
  const fs::path dir = scratch("zero");
  const json cfg = {{"regime", "BO"}, {"gamma", 0.8}, {"alpha", 1.2}, {"l", 8}, {"N", 64}, {"dt", 1e-2},
                    {"t_end", 0.5}, {"record_every", 10},
                    {"initial", {{"shape", "sech2"}, {"amplitude", 0.0}, {"width", 1.0}}}};
  REQUIRE(ilwsolve("evolve", dir, cfg).code == cli::kSuccess);
  const json m = manifest(dir);
  CHECK(m["exit_status"] == 0);
  CHECK(m["files"].size() == 6);
  for (const auto& f : m["files"]) {
    const NodalWave w = read_wave_csv(dir / "out" / f.get<std::string>());
    CHECK(w.x.size() == 64);
    for (double v : w.zeta) CHECK(v == 0.0);
    for (double v : w.u) CHECK(v == 0.0);
  }
}

TEST_CASE("solitary: ILW wave converges; manifest round trip and repeat runs reproduce files") {
  const fs::path dir = scratch("ilw_wave");
  REQUIRE(ilwsolve("solitary", dir, kIlwWave).code == cli::kSuccess);
  const json m = manifest(dir);
  CHECK(m["command"] == "solitary");
  CHECK(m["config"]["tol"] == 1e-10);
  CHECK(m["files"] == json::array({"wave.csv", "trace.csv", "wave.json"}));
  const std::string wave = slurp(dir / "out" / "wave.csv");
  const std::string trace = slurp(dir / "out" / "trace.csv");
  CHECK(trace.rfind("iter,residual,m_factor,phase\n", 0) == 0);

  const fs::path again = scratch("ilw_wave_again");
  REQUIRE(ilwsolve("solitary", again, kIlwWave).code == cli::kSuccess);
  CHECK(slurp(again / "out" / "wave.csv") == wave);
  CHECK(slurp(again / "out" / "trace.csv") == trace);

  const fs::path replay = scratch("ilw_wave_replay");
  fs::copy_file(dir / "out" / "manifest.json", replay / "manifest.json");
  const std::string line = std::string(ILWSOLVE_PATH) + " solitary --quiet --config " +
                           (replay / "manifest.json").string() + " --out " + (replay / "out").string();
  REQUIRE(std::system(line.c_str()) == 0);
  CHECK(slurp(replay / "out" / "wave.csv") == wave);

  // A manifest is refused by the wrong subcommand.
  const std::string wrong = std::string(ILWSOLVE_PATH) + " evolve --quiet --config " +
                            (replay / "manifest.json").string() + " --out " + (replay / "bad").string() +
                            " 2> /dev/null";
  const int status = std::system(wrong.c_str());
  CHECK(WEXITSTATUS(status) == cli::kConfigError);
}

TEST_CASE("solitary: cap binds at max_iter = 5") {
  const fs::path dir = scratch("cap");
  json cfg = kIlwWave;
  cfg["max_iter"] = 5;
  CHECK(ilwsolve("solitary", dir, cfg).code == cli::kNotConverged);
  CHECK(data_rows(dir / "out" / "trace.csv") == 5);
  CHECK(manifest(dir)["exit_status"] == cli::kNotConverged);
}

TEST_CASE("solitary: speed on the linear spectrum is a singular mode") {
  const ModelParams p{0.8, 1.2, Regime::ILW};
  const SpectralGrid g(16.0, 64);
  const double k = g.wavenumber(g.slot(7));
  const double c = test::singular_speed(p, k, 0.0, 1.0);
  const fs::path dir = scratch("singular");
  json cfg = kIlwWave;
  cfg["c"] = c;
  cfg["l"] = 16;
  cfg["N"] = 64;
  const Outcome o = ilwsolve("solitary", dir, cfg);
  CHECK(o.code == cli::kSingularMode);
  CHECK(o.err.find("singular") != std::string::npos);
  CHECK(std::abs(manifest(dir)["singular_wavenumber"].get<double>()) == doctest::Approx(k));
}

TEST_CASE("evolve: solitary wave as from-file data travels at speed c") {
  const fs::path dir = scratch("from_file");
  REQUIRE(ilwsolve("solitary", dir, kIlwWave).code == cli::kSuccess);
  fs::rename(dir / "out", dir / "wave");
  json cfg = kIlwWave;
  cfg.erase("c");
  cfg["dt"] = 1e-3;
  cfg["t_end"] = 1.0;
  cfg["record_every"] = 1000;
  cfg["initial"] = {{"shape", "file"}, {"path", "wave/wave.csv"}};
  REQUIRE(ilwsolve("evolve", dir, cfg).code == cli::kSuccess);
  const json m = manifest(dir);
  CHECK(fs::path(m["config"]["initial"]["path"].get<std::string>()).is_absolute());
  REQUIRE(m["files"].size() == 2);

  const SpectralGrid g(64.0, 1024);
  const Transform t(g);
  const NodalWave w0 = read_wave_csv(dir / "wave" / "wave.csv");
  const NodalWave w1 = read_wave_csv(dir / "out" / m["files"][1].get<std::string>());
  const StatePair start{t.to_coefficients(w0.zeta), t.to_coefficients(w0.u)};
  const StatePair end{t.to_coefficients(w1.zeta), t.to_coefficients(w1.u)};
  const StatePair back = translate(g, end, -0.52);
  CHECK(nodal_norm(back - start) <= 1e-6 * nodal_norm(start));
}

TEST_CASE("verify: accel experiment writes the table and per-run traces") {
  const fs::path dir = scratch("verify_accel");
  const json cfg = {{"experiments", {{"accel", {{"mw_list", {1, 2}}}}}}};
  const Outcome o = ilwsolve("verify", dir, cfg);
  CHECK((o.code == cli::kSuccess || o.code == cli::kVerifyFailed));
  const std::string table = slurp(dir / "out" / "acceleration_table.csv");
  CHECK(table.rfind("mw,iterations,seconds,status\n", 0) == 0);
  CHECK(fs::exists(dir / "out" / "traces" / "trace_mw_0002.csv"));
  const std::string summary = slurp(dir / "out" / "summary.txt");
  CHECK(summary.find("acceleration ordering") != std::string::npos);
  CHECK((o.code == cli::kSuccess) == (summary.find("ALL PASS") != std::string::npos));
  CHECK(manifest(dir)["config"]["experiments"]["accel"]["c"] == 0.57);
}

TEST_CASE("verify: convergence experiment reports spectral decay") {
  const fs::path dir = scratch("verify_convergence");
  const json cfg = {{"experiments", {{"convergence", {{"regimes", {"BO"}}, {"t_end", 0.05}}}}}};
  CHECK(ilwsolve("verify", dir, cfg, "--threads 2").code == cli::kSuccess);
  CHECK(data_rows(dir / "out" / "convergence_report.csv") == 3);
}

TEST_CASE("verify: nothing selected is a config error") {
  const fs::path dir = scratch("verify_empty");
  const Outcome o = ilwsolve("verify", dir, json{{"experiments", json::object()}});
  CHECK(o.code == cli::kConfigError);
  CHECK(o.err.find("experiments") != std::string::npos);
}
