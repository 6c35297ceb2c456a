#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>

namespace {

const std::string kCli = RABI_CLI;
const std::string kDir = TEST_DIR;

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + kCli + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return kDir + "/" + name; }

}  // namespace

TEST_CASE("exit codes") {
  CHECK(run("gfunction --preset fig1 --steps 20") == 0);
  CHECK(run("--help") == 0);
  CHECK(run("") == 1);
  CHECK(run("gfunction --omega -1") == 1);
  CHECK(run("gfunction --omega abc") == 1);
  CHECK(run("gfunction --format xml") == 1);
  CHECK(run("gfunction --model three-photon") == 1);
  CHECK(run("gfunction --preset fig9") == 1);
  CHECK(run("gfunction --config /nonexistent.json") == 1);
  CHECK(run("gfunction --preset fig1 --steps 20", "RABI_THREADS=lots") == 1);
  CHECK(run("gfunction --delta 0.2 --lambda 0.25 --g 0.9") == 2);
  CHECK(run("juddian --delta 0.2 --lambda 1") == 2);
  CHECK(run("spectrum --delta 0.2 --lambda 0 --gmin 0.1 --gmax 0.2 --gsteps 2") == 2);
  CHECK(run("entropy --delta 0.2 --lambda 0.25 --gmin 0.7999 --gmax 0.7999 --gsteps 1") == 3);
}

TEST_CASE("validity message names g_c") {
  const std::string cmd = kCli + " gfunction --delta 0.2 --lambda 0.25 --g 0.9 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p);
  char buf[512] = {0};
  std::string text;
  while (std::fgets(buf, sizeof buf, p)) text += buf;
  pclose(p);
  CHECK(text.find("g_c = 0.8") != std::string::npos);
}

TEST_CASE("gfunction output, sidecar and determinism") {
  const std::string a = path("g_a.csv"), b = path("g_b.csv");
  REQUIRE(run("gfunction --preset fig1 --steps 400 --out " + a) == 0);
  REQUIRE(run("gfunction --preset fig1 --steps 400 --out " + b, "RABI_THREADS=3") == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text.rfind("# config: {\"command\":\"gfunction\",\"model\":\"two-photon\"", 0) == 0);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  CHECK(line == "E,G_plus,G_minus,near_pole,converged");
  std::getline(in, line);
  CHECK(line.rfind("-0.5,", 0) == 0);
  CHECK(line.find('\r') == std::string::npos);
  const auto side = nlohmann::json::parse(slurp(a + ".poles.json"));
  CHECK(side["poles"].size() == 3);
  CHECK(side["poles"][0]["m"] == 0);
}

TEST_CASE("decoupled zeros land on the grid") {
  const std::string out = path("g0.csv");
  REQUIRE(run("gfunction --delta 0.2 --lambda 0.5 --g 0 --emin -0.4 --emax 2.4 --steps 29 --out " + out) == 0);
  std::istringstream in(slurp(out));
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  int zeros = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    double E, gp, gm;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &E, &gp, &gm) == 3);
    if (std::abs(gp) < 1e-12 || std::abs(gm) < 1e-12) ++zeros;
  }
  CHECK(zeros == 4);  // -0.2, 0.2, 1.8, 2.2
}

TEST_CASE("precedence: preset < config file < flags") {
  const std::string cfg = path("cfg.json");
  {
    std::ofstream f(cfg);
    f << R"({"preset": "fig1", "g": 0.25, "steps": 10})";
  }
  const std::string out = path("prec.json");
  REQUIRE(run("gfunction --config " + cfg + " --steps 12 --format json --out " + out) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  CHECK(doc["config"]["g"] == 0.25);
  CHECK(doc["config"]["steps"] == 12);
  CHECK(doc["config"]["delta"] == 0.2);
  CHECK(doc["rows"].size() == 12);
  {
    std::ofstream f(cfg);
    f << R"({"gamma": 1})";
  }
  CHECK(run("gfunction --config " + cfg) == 1);
  {
    std::ofstream f(cfg);
    f << R"({"g": "big"})";
  }
  CHECK(run("gfunction --config " + cfg) == 1);
}

TEST_CASE("juddian records") {
  const std::string out = path("j.json");
  REQUIRE(run("juddian --preset fig2 --format json --out " + out) == 0);
  const auto doc = nlohmann::json::parse(slurp(out));
  const auto& recs = doc["records"];
  REQUIRE(recs.size() == 2);
  CHECK(std::abs(recs[0]["delta_g"].get<double>()) < 1e-6);
  CHECK(std::abs(recs[1]["delta_g"].get<double>()) < 1e-6);
  CHECK(std::abs(recs[0]["g_analytic"].get<double>() - 0.6532) < 1e-4);
}

TEST_CASE("spectrum rows carry both sources and a warning past g_c") {
  const std::string out = path("s.csv");
  REQUIRE(run("spectrum --delta 0.2 --lambda 0.25 --gmin 0.3 --gmax 0.85 --gsteps 2 --levels 2 --out " + out) == 0);
  const std::string text = slurp(out);
  CHECK(text.find("g,level_index,branch,sector,E,source\n") != std::string::npos);
  CHECK(text.find(",exact\n") != std::string::npos);
  CHECK(text.find(",oracle\n") != std::string::npos);
  CHECK(text.find("# warning: g=0.85") != std::string::npos);
  CHECK(text.find("0.29999999999999999,0,+,even,-0.2052726667") != std::string::npos);
}

TEST_CASE("oracle, entropy and critical commands") {
  const std::string o = path("o.csv"), e = path("e.csv"), c = path("c.json");
  REQUIRE(run("oracle --delta 0.2 --lambda 0.25 --g 0.3 --levels 4 --out " + o) == 0);
  const std::string ot = slurp(o);
  CHECK(ot.find("index,E,parity,stable\n0,-0.205272666") != std::string::npos);
  CHECK(ot.find(",+1,1\n") != std::string::npos);
  REQUIRE(run("entropy --delta 0.2 --lambda 0.25 --gmin 0.6 --gmax 0.7 --gsteps 11 --out " + e) == 0);
  const std::string et = slurp(e);
  CHECK(et.find("g,level,S,parity,ambiguous\n") != std::string::npos);
  CHECK(et.find("# jumps: [{\"level\":0,\"g_lo\":0.65319") != std::string::npos);
  REQUIRE(run("critical --delta 0.2 --lambda 0.25 --gmin 0.2 --gmax 0.6 --gsteps 3 --gsuper 0.85 "
              "--ntrunc-list 60,90 --format json --out " + c) == 0);
  const auto doc = nlohmann::json::parse(slurp(c));
  CHECK(doc["rows"].size() == 3);
  CHECK(doc["supercritical"]["points"].size() == 2);
  CHECK(run("critical --delta 0.2 --lambda 0.25 --gmin 0.2 --gmax 0.9 --gsteps 3") == 2);
}
