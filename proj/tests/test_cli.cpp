#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code = -1;
  std::string out;  // stdout and stderr merged
};

std::string cli() {
  const char* p = std::getenv("CURLDIV_CLI");
  REQUIRE_MESSAGE(p, "CURLDIV_CLI must point at the curldiv binary");
  return p;
}

Run run(const std::string& args) {
  Run r;
  const std::string cmd = "\"" + cli() + "\" " + args + " 2>&1";
  FILE* f = popen(cmd.c_str(), "r");
  REQUIRE(f);
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, f)) > 0;) r.out.append(buf, n);
  const int st = pclose(f);
  r.code = WIFEXITED(st) ? WEXITSTATUS(st) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / "curldiv_cli_test" / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json preset(const std::string& name) {
  const auto r = run("list-presets --json");
  REQUIRE(r.code == 0);
  for (const auto& p : json::parse(r.out))
    if (p["name"] == name) return p["config"];
  FAIL("missing preset " << name);
  return {};
}

}  // namespace

TEST_CASE("list-presets: text and json") {
  const auto text = run("list-presets");
  CHECK(text.code == 0);
  CHECK(std::count(text.out.begin(), text.out.end(), '\n') >= 8);
  const auto js = run("list-presets --json");
  REQUIRE(js.code == 0);
  const auto arr = json::parse(js.out);
  REQUIRE(arr.is_array());
  CHECK(arr.size() >= 8);
  for (const auto& p : arr) {
    CHECK(p.contains("name"));
    CHECK(p["config"].contains("task"));
  }
}

TEST_CASE("usage errors exit 1") {
  const auto r = run("list-presets --bogus");
  CHECK(r.code == 1);
  CHECK(r.out.find("Usage") != std::string::npos);
  CHECK(run("").code == 1);
  CHECK(run("run energy-identity --threads 0").code == 1);
  CHECK(run("run no-such-preset").code == 1);
}

TEST_CASE("malformed json: exit 1 with line and column") {
  const auto dir = scratch("malformed");
  const auto cfg = dir / "bad.json";
  std::ofstream(cfg) << "{\n  \"task\": {\"kind\": \"dirichlet\",}\n}\n";
  const auto r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("ConfigError") != std::string::npos);
  CHECK(r.out.find("bad.json:2:") != std::string::npos);
}

TEST_CASE("schema errors name the offending key") {
  const auto dir = scratch("schema");
  const auto cfg = dir / "c.json";
  std::ofstream(cfg) << R"({"task": {"kind": "greens", "mode": "sideways"}, "domain": {"n": 6}})";
  auto r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("/task/mode") != std::string::npos);
  std::ofstream(cfg) << R"({"task": {"kind": "dirichlet"}, "domain": {"n": "eight"}})";
  r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("/domain/n") != std::string::npos);
  std::ofstream(cfg) << R"({"task": {"kind": "dirichlet"}, "domain": {"n": 6}, "solver": {"preconditioner": "magic"}})";
  r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 1);
  CHECK(r.out.find("/solver/preconditioner") != std::string::npos);
  std::ofstream(cfg) << R"({"task": {"kind": "dirichlet"}, "domain": {"n": 6}, "solver": {"preconditioner": "ssor"}})";
  CHECK(run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"").code == 0);
}

TEST_CASE("run verify-greens.json: samples, fit and exit 0") {
  const auto dir = scratch("greens");
  const auto cfg = dir / "verify-greens.json";
  std::ofstream(cfg) << preset("verify-greens").dump(2);
  const auto r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  const auto fit = json::parse(slurp(dir / "out" / "fit.json"));
  CHECK(fit["slope"].get<double>() == doctest::Approx(-1.0).epsilon(0.05));
  const auto csv = slurp(dir / "out" / "greens_samples.csv");
  CHECK(csv.rfind("t,x0,x1,x2,y0,y1,y2,g00", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') > 100);
  const auto s = json::parse(slurp(dir / "out" / "summary.json"));
  for (const char* k : {"task", "inputs_digest", "metrics", "pass"}) CHECK(s.contains(k));
  CHECK(s["task"] == "greens");
  CHECK(s["pass"] == true);
  CHECK(s["inputs_digest"].get<std::string>().size() == 16);
}

TEST_CASE("run thermo preset: fields and trace") {
  const auto dir = scratch("thermo");
  const auto r = run("run thermo --out \"" + dir.string() + "\"");
  REQUIRE_MESSAGE(r.code == 0, r.out);
  for (int n : {8, 16}) {
    const auto vtk = slurp(dir / ("fields_" + std::to_string(n) + ".vtk"));
    CHECK(vtk.rfind("# vtk DataFile Version 3.0", 0) == 0);
    CHECK(vtk.find("DATASET STRUCTURED_POINTS") != std::string::npos);
    CHECK(vtk.find("VECTORS H double") != std::string::npos);
    CHECK(vtk.find("SCALARS u double 1") != std::string::npos);
    CHECK(slurp(dir / ("trace_" + std::to_string(n) + ".csv")).rfind("iteration,residual,relaxation", 0) == 0);
  }
}

TEST_CASE("verification failure exits 2 and still writes the trace") {
  const auto dir = scratch("diverge");
  const auto cfg = dir / "c.json";
  std::ofstream(cfg) << R"({"task": {"kind": "app", "app": "quasilinear", "A": "adversarial", "B": "adversarial",
                           "max_iter": 3}, "domain": {"n": 6}})";
  const auto r = run("run \"" + cfg.string() + "\" --out \"" + (dir / "out").string() + "\"");
  CHECK(r.code == 2);
  const auto s = json::parse(slurp(dir / "out" / "summary.json"));
  CHECK(s["pass"] == false);
  CHECK(s["metrics"]["trace"]["iterations"] == 3);
  CHECK(fs::exists(dir / "out" / "trace.csv"));
}

TEST_CASE("library errors exit 1 and leave a summary") {
  for (const char* p : {"error-incompatible-h", "error-nonsolenoidal", "error-boundary-source"}) {
    const auto dir = scratch(p);
    const auto r = run(std::string("run ") + p + " --out \"" + dir.string() + "\"");
    CHECK(r.code == 1);
    const auto s = json::parse(slurp(dir / "summary.json"));
    CHECK(s["pass"] == false);
    CHECK(s.contains("error"));
  }
}

TEST_CASE("outputs are bit-reproducible, also across thread counts") {
  const auto a = scratch("repro_a"), b = scratch("repro_b");
  REQUIRE(run("run greens-global --out \"" + a.string() + "\"").code == 0);
  REQUIRE(run("run greens-global --threads 3 --out \"" + b.string() + "\"").code == 0);
  for (const char* f : {"summary.json", "fit.json", "greens_samples.csv"}) CHECK(slurp(a / f) == slurp(b / f));
  const auto c = scratch("repro_c"), d = scratch("repro_d");
  REQUIRE(run("run energy-identity --out \"" + c.string() + "\"").code == 0);
  REQUIRE(run("run energy-identity --out \"" + d.string() + "\"").code == 0);
  CHECK(slurp(c / "summary.json") == slurp(d / "summary.json"));
}
