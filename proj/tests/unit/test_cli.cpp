#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class Sandbox {
 public:
  Sandbox() : dir_(fs::temp_directory_path() / ("mrp-cli-" + std::to_string(::getpid()))) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }

  const fs::path& dir() const { return dir_; }

  Run run(const std::string& args) const {
    const fs::path out = dir_ / "stdout.txt";
    const fs::path err = dir_ / "stderr.txt";
    const std::string cmd = std::string(MRP_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  fs::path write(const std::string& name, const std::string& text) const {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

 private:
  fs::path dir_;
};

std::size_t count_lines(const std::string& text) {
  std::size_t n = 0;
  for (char c : text) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("print-default-config output is accepted as a config") {
  Sandbox box;
  const Run r = box.run("print-default-config");
  REQUIRE(r.code == 0);
  CHECK(r.out.find("sample_sizes = 200,300,400") != std::string::npos);
  CHECK(r.out.find("replicates = 100") != std::string::npos);
  const fs::path cfg = box.write("default.cfg", r.out);
  const Run again = box.run("print-default-config --config " + cfg.string());
  CHECK(again.code == 0);
}

TEST_CASE("simulate") {
  Sandbox box;
  const fs::path cfg = box.write("sim.cfg", "sample_sizes = 400,0\nreplicates = 1\n");
  const fs::path out = box.dir() / "traj";
  const Run r = box.run("simulate --config " + cfg.string() + " --output " + out.string());
  REQUIRE(r.code == 0);
  const std::string first = slurp(out / "trajectory_n400_r000.csv");
  CHECK(count_lines(first) == 402);
  CHECK(count_lines(slurp(out / "trajectory_n0_r000.csv")) == 2);

  REQUIRE(box.run("simulate --config " + cfg.string() + " --output " + out.string()).code == 0);
  CHECK(slurp(out / "trajectory_n400_r000.csv") == first);

  REQUIRE(box.run("simulate --seed 9 --config " + cfg.string() + " --output " + out.string()).code == 0);
  CHECK(slurp(out / "trajectory_n400_r000.csv") != first);
}

TEST_CASE("estimate") {
  Sandbox box;
  const fs::path cfg = box.write("sim.cfg", "sample_sizes = 400\nreplicates = 1\n");
  const fs::path traj_dir = box.dir() / "traj";
  REQUIRE(box.run("simulate --config " + cfg.string() + " --output " + traj_dir.string()).code == 0);
  const fs::path traj = traj_dir / "trajectory_n400_r000.csv";

  SUBCASE("writes both curves") {
    const fs::path est = box.dir() / "est";
    const Run r = box.run("estimate --config " + cfg.string() + " --output " + est.string() + " " + traj.string());
    REQUIRE(r.code == 0);
    const std::string cum = slurp(est / "trajectory_n400_r000_cumulative.csv");
    const std::string rate = slurp(est / "trajectory_n400_r000_rate.csv");
    CHECK(cum.rfind("time,estimate,variance,ci_low,ci_high\n", 0) == 0);
    CHECK(rate.rfind("time,rate,flag_edge\n", 0) == 0);
    CHECK(count_lines(cum) == 513);
    CHECK(count_lines(rate) == 513);
  }
  SUBCASE("horizon violation is a domain error") {
    const fs::path bad = box.write("bad.cfg", "t_max = 1.0\n");
    const Run r = box.run("estimate --config " + bad.string() + " --output " + box.dir().string() + " " + traj.string());
    CHECK(r.code == 3);
    CHECK(r.err.find("horizon") != std::string::npos);
  }
  SUBCASE("malformed trajectory reports its line") {
    const fs::path broken =
        box.write("broken.csv", "index,mark,sojourn,censored\n0,30,,\n1,20,0.2,0\n2,x,0.3,0\n");
    const Run r = box.run("estimate --output " + box.dir().string() + " " + broken.string());
    CHECK(r.code == 2);
    CHECK(r.err.find("line 4") != std::string::npos);
  }
  SUBCASE("unvisited cell gives zero curves and a warning") {
    std::string text = "index,mark,sojourn,censored\n0,40,,\n";
    for (int i = 1; i <= 100; ++i) text += std::to_string(i) + ",40,0.3,0\n";
    const fs::path away = box.write("away.csv", text);
    const fs::path est = box.dir() / "away";
    const Run r = box.run("estimate --output " + est.string() + " " + away.string());
    REQUIRE(r.code == 0);
    CHECK(r.err.find("warning") != std::string::npos);
    std::istringstream rows(slurp(est / "away_rate.csv"));
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) {
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      CHECK(std::stod(line.substr(first + 1, second - first - 1)) == 0.0);
    }
  }
}

TEST_CASE("experiment output is deterministic") {
  Sandbox box;
  const fs::path cfg = box.write("exp.cfg", "sample_sizes = 100,200\nreplicates = 5\n");
  const fs::path a = box.dir() / "a";
  const fs::path b = box.dir() / "b";
  REQUIRE(box.run("experiment --jobs 1 --config " + cfg.string() + " --output " + a.string()).code == 0);
  REQUIRE(box.run("experiment --jobs 3 --config " + cfg.string() + " --output " + b.string()).code == 0);
  CHECK(slurp(a / "ise.csv") == slurp(b / "ise.csv"));
  CHECK(count_lines(slurp(a / "ise.csv")) == 11);
  CHECK(fs::exists(a / "report.json"));
  CHECK(fs::exists(a / "curves.csv"));
}

TEST_CASE("usage errors") {
  Sandbox box;
  CHECK(box.run("").code != 0);
  CHECK(box.run("estimate").code != 0);
  const fs::path cfg = box.write("bad.cfg", "no_such_key = 1\n");
  CHECK(box.run("simulate --config " + cfg.string()).code == 3);
}
