#include <doctest.h>

#include <stdlib.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "epirep/cli.hpp"

using namespace epirep;
namespace fs = std::filesystem;

namespace {

const char* kReference =
    "# reference parameters\n"
    "c_P = 1\nalpha = 0.5\nbeta_u = 0.3\nbeta_p = 0.15\nc_IU = 2\nc_IP = 1\nL = 80\n"
    "gamma = 0.1   # recovery\n";

struct Sandbox {
  fs::path dir;

  Sandbox() {
    std::string tmpl = (fs::temp_directory_path() / "epirep_test_XXXXXX").string();
    REQUIRE(::mkdtemp(tmpl.data()) != nullptr);
    dir = tmpl;
  }
  ~Sandbox() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  fs::path config(const std::string& extra = "") const {
    const fs::path p = dir / "run.cfg";
    std::ofstream(p) << kReference << extra;
    return p;
  }
};

struct Result {
  int code;
  std::string out, err;
};

Result run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_SUITE("config") {
  TEST_CASE("parses key = value with comments") {
    const ConfigEntries e = parse_config_text(kReference);
    CHECK(e.size() == 8);
    CHECK(e.at("gamma") == "0.1");
    const RunConfig cfg = build_config(e);
    CHECK(cfg.params.L == 80.0);
    CHECK_FALSE(cfg.s0.has_value());
    CHECK(cfg.gamma_range.lo == 0.01);
    CHECK(cfg.gamma_range.hi == 0.25);
    CHECK(cfg.delta == 1e-2);
  }

  TEST_CASE("optional keys") {
    const RunConfig cfg = build_config(parse_config_text(
        std::string(kReference) + "s0 = 0.1, 0.2, 0.3\nmethod = rk4_fixed\nregime = fast-epidemic\neps = 1e-4\n"));
    REQUIRE(cfg.s0.has_value());
    CHECK(*cfg.s0 == SystemState(0.1, 0.2, 0.3));
    CHECK(cfg.integrator.method == Method::Rk4Fixed);
    CHECK(cfg.mode == SlowFastMode::FastEpidemic);
    CHECK(cfg.eps == 1e-4);
  }

  TEST_CASE("errors name the offending key or line") {
    auto message = [](const std::string& text) {
      try {
        (void)build_config(parse_config_text(text));
      } catch (const ConfigError& e) {
        return std::string(e.what());
      }
      return std::string();
    };
    CHECK(message("c_P = 1\nbogus = 3\n").find("line 2: unknown key 'bogus'") != std::string::npos);
    CHECK(message("c_P = 1\nc_P = 2\n").find("duplicate key 'c_P'") != std::string::npos);
    CHECK(message("c_P = 1\n").find("missing required config key 'alpha'") != std::string::npos);
    CHECK(message(std::string(kReference) + "s0 = 0.1, 0.2\n").find("'s0'") != std::string::npos);
    CHECK(message(std::string(kReference) + "dt = fast\n").find("'dt'") != std::string::npos);
    CHECK(message("just text\n").find("line 1") != std::string::npos);
    CHECK(message(std::string(kReference) + "t_end = -1\n").size() > 0);
  }
}

TEST_SUITE("cli") {
  TEST_CASE("equilibria") {
    Sandbox box;
    const Result r = run({"equilibria", "--config", box.config().string(), "--out", box.dir.string()});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("regime alpha*beta_p<gamma<beta_p,y_int<y_u") != std::string::npos);
    const std::string csv = slurp(box.dir / "equilibria.csv");
    CHECK(csv.rfind("id,exists,y,z_S,z_I,re_lambda_1", 0) == 0);
    CHECK(csv.find("\nE3,1,0.16666666666666666,0.6") != std::string::npos);
  }

  TEST_CASE("boundary parameters exit with a config error naming the coincidence") {
    Sandbox box;
    const Result r = run({"equilibria", "--config", box.config().string(), "--gamma", "0.15", "--out", box.dir.string()});
    CHECK(r.code == cli::kExitConfig);
    CHECK(r.err.find("gamma = beta_p") != std::string::npos);
  }

  TEST_CASE("invalid input exits 2") {
    Sandbox box;
    CHECK(run({"equilibria"}).code == cli::kExitConfig);
    CHECK(run({"simulate", "--config", (box.dir / "missing.cfg").string()}).code == cli::kExitConfig);
    CHECK(run({"equilibria", "--config", box.config().string(), "--set", "alpha=2"}).code == cli::kExitConfig);
    CHECK(run({"simulate", "--config", box.config().string(), "--out", box.dir.string()}).code == cli::kExitConfig);
    CHECK(run({"equilibria", "--config", box.config("nonsense = 1\n").string()}).code == cli::kExitConfig);
  }

  TEST_CASE("stiffness exits 3") {
    Sandbox box;
    const Result r = run({"slowfast", "--config", box.config("s0 = 0.5, 0.5, 0.5\nregime = fast-epidemic\nt_end = 1\n").string(),
                          "--eps", "1e-300", "--out", box.dir.string()});
    CHECK(r.code == cli::kExitNumerical);
    CHECK(r.err.find("numerical failure") != std::string::npos);
  }

  TEST_CASE("simulate is deterministic and matches slowfast at eps = 1") {
    Sandbox box;
    const std::string cfg = box.config("s0 = 0.3, 0.5, 0.5\nt_end = 200\n").string();
    const fs::path a = box.dir / "a", b = box.dir / "b", c = box.dir / "c";
    REQUIRE(run({"simulate", "--config", cfg, "--out", a.string()}).code == 0);
    REQUIRE(run({"simulate", "--config", cfg, "--out", b.string()}).code == 0);
    REQUIRE(run({"slowfast", "--config", cfg, "--eps", "1", "--out", c.string()}).code == 0);
    const std::string ta = slurp(a / "trajectory.csv");
    CHECK(ta.rfind("t,y,z_S,z_I,beta_eff,delta_F\n", 0) == 0);
    CHECK(ta == slurp(b / "trajectory.csv"));
    CHECK(ta == slurp(c / "trajectory.csv"));
  }

  TEST_CASE("fast-behavior slowfast oscillates") {
    Sandbox box;
    const std::string cfg = box.config("s0 = 0.5, 0.5, 0.5\nt_end = 300\n").string();
    const Result r = run({"slowfast", "--config", cfg, "--eps", "0.01", "--out", box.dir.string()});
    REQUIRE(r.code == 0);
    const auto pos = r.out.find("delta_F sign changes ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stoi(r.out.substr(pos + 21)) >= 3);
    CHECK_FALSE(fs::exists(box.dir / "delay.csv"));
  }

  TEST_CASE("fast-epidemic slowfast reports a delay") {
    Sandbox box;
    const std::string cfg =
        box.config("s0 = 1e-3, 0.05, 0\nregime = fast-epidemic\nt_end = 30\nmax_dt = 0.05\n").string();
    const Result r = run({"slowfast", "--config", cfg, "--eps", "1e-4", "--out", box.dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("bifurcation delay ") != std::string::npos);
    const std::string csv = slurp(box.dir / "delay.csv");
    CHECK(csv.rfind("gamma,eps,delta,t_cross,t_takeoff,delay\n0.10000000000000001,0.0001,0.01,", 0) == 0);
  }

  TEST_CASE("bifurcate writes both tables") {
    Sandbox box;
    const Result r = run({"bifurcate", "--config", box.config("n_steps = 49\n").string(), "--out", box.dir.string()});
    REQUIRE(r.code == 0);
    CHECK(r.out.find("T1 gamma* = 0.15") != std::string::npos);
    const std::string branches = slurp(box.dir / "branches.csv");
    CHECK(branches.rfind("branch,gamma,y,z_S,z_I,re_lambda_max,stable\n", 0) == 0);
    const std::string points = slurp(box.dir / "bifurcations.csv");
    CHECK(std::count(points.begin(), points.end(), '\n') == 5);
  }

  TEST_CASE("thread budget from the environment") {
    ::setenv("EPIREP_THREADS", "3", 1);
    CHECK(cli::thread_budget() == 3);
    ::setenv("EPIREP_THREADS", "zero", 1);
    CHECK(cli::thread_budget() >= 1);
    ::unsetenv("EPIREP_THREADS");
  }
}
