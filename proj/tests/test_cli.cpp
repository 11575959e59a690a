// Exit codes and a few end-to-end subcommand runs of the command-line tool.

#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kCli = STRELCAST_CLI_PATH;
const fs::path kData = STRELCAST_DATA_DIR;

int run(const std::string& args) {
  const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "strelcast_cli_test";
  fs::create_directories(dir);
  return dir / name;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run(""), 1);
  EXPECT_EQ(run("frobnicate"), 1);
  EXPECT_EQ(run("monitor --grid " + (kData / "grid.json").string()), 1);  // no trace, no property
  EXPECT_EQ(run("monitor --grid " + (kData / "grid.json").string() + " --trace " + (kData / "trace.csv").string() +
                " --formula 'y >> 3'"),
            1);
  EXPECT_EQ(run("pipeline"), 1);
  EXPECT_EQ(run("--workers 0 pipeline"), 1);
  EXPECT_EQ(run("--help"), 0);
}

TEST(Cli, MonitorWritesVerificationField) {
  const auto out = scratch("p1.csv");
  fs::remove(out);
  EXPECT_EQ(run("--out " + out.string() + " monitor --grid " + (kData / "grid.json").string() + " --trace " +
                (kData / "trace.csv").string() + " --property P1 --c 800 --h-steps 3"),
            0);
  const auto text = slurp(out);
  EXPECT_EQ(text.rfind("location_id,mode,value\n", 0), 0u) << text;
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 50);
}

TEST(Cli, DataErrors) {
  const auto grid = scratch("grid.json");
  write(grid, R"({"rows": 1, "cols": 2, "adjacency": "queen"})");
  const auto short_trace = scratch("short.csv");
  write(short_trace, "location_id,time_index,value\n0,0,1\n0,1,2\n1,0,3\n1,1,4\n");
  // P1 with h = 3 needs three steps after the anchor.
  const auto monitor = "monitor --grid " + grid.string() + " --trace " + short_trace.string() + " --property P1 --c 2";
  EXPECT_EQ(run(monitor + " --h-steps 1"), 0);
  EXPECT_EQ(run(monitor + " --h-steps 3"), 2);
  const auto garbage = scratch("garbage.csv");
  write(garbage, "location_id,time_index,value\n0,0,1\n0,1,abc\n");
  EXPECT_EQ(run("spectrum --data " + garbage.string()), 2);
  const auto lpds = scratch("lpds.csv");
  write(lpds, "window_id,variant,horizon,lpds\n0,car_ar,1,-3.5\n");
  EXPECT_EQ(run("compare --lpds " + lpds.string() + " --variant car_ar --reference baseline --horizon 1"), 2);
}

TEST(Cli, CompareComputesRunningSum) {
  const auto lpds = scratch("lpds_ok.csv");
  write(lpds,
        "window_id,variant,horizon,lpds\n"
        "0,car_ar,1,-3.5\n0,baseline,1,-4\n"
        "1,car_ar,1,-2\n1,baseline,1,-1.5\n"
        "1,car_ar,2,-9\n1,baseline,2,-1\n");
  const auto out = scratch("bf.csv");
  EXPECT_EQ(run("--out " + out.string() + " compare --lpds " + lpds.string() +
                " --variant car_ar --reference baseline --horizon 1"),
            0);
  EXPECT_EQ(slurp(out), "window_id,lpds_difference,cumulative_log_bf\n0,0.5,0.5\n1,-0.5,0\n");
}
