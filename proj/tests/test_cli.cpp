#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"
#include "config.hpp"
#include "doctest.h"
#include "support/approx.hpp"
#include "json.hpp"
#include "output.hpp"

using namespace coalesce::cli;
using testing::Approx;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> data_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '#') lines.push_back(line);
  }
  return lines;
}

nlohmann::json data_of(const Run& r) { return nlohmann::json::parse(r.out).at("data"); }

std::filesystem::path temp_file(const std::string& name, const std::string& text) {
  const auto path = std::filesystem::temp_directory_path() / ("coalesce_test_" + name);
  std::ofstream(path, std::ios::binary) << text;
  return path;
}

}  // namespace

TEST_CASE("spectrum emits a k,T table") {
  const Run r = run({"spectrum", "--zeta", "-10", "--zeta-m", "-50", "--kmin", "5.8", "--kmax", "6.4",
                     "--points", "2001", "--format", "csv"});
  REQUIRE(r.code == 0);
  const auto lines = data_lines(r.out);
  REQUIRE(lines.size() == 2002);
  CHECK(lines[0] == "k,T");
  CHECK(lines[1].rfind("5.8,", 0) == 0);
  CHECK(lines.back().rfind("6.4,", 0) == 0);
  CHECK(r.out.find('\r') == std::string::npos);
  CHECK(r.out.rfind("# version = ", 0) == 0);
  CHECK(r.out.find("# zeta_m = -50\n") != std::string::npos);
}

TEST_CASE("threshold json") {
  const Run r = run({"threshold", "--zeta", "-10", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto doc = nlohmann::json::parse(r.out);
  CHECK(doc.at("params").at("zeta").get<double>() == -10.0);
  CHECK(doc.at("params").contains("version"));
  CHECK(doc.at("data").at("zeta_m_star").get<double>() == Approx(-200.998).epsilon(5e-6));
  CHECK(doc.at("data").at("zeta_m_merge").get<double>() == Approx(-200.998).epsilon(0.05));
}

TEST_CASE("report") {
  const Run r = run({"report", "--zeta", "-10", "--zeta-m", "-196.6"});
  REQUIRE(r.code == 0);
  const auto d = data_of(r);
  CHECK(d.at("kappa").get<double>() == Approx(4.9752e-3).epsilon(1e-4));
  CHECK(d.at("delta").get<double>() == Approx(5.0864e-3).epsilon(1e-4));
  CHECK(d.at("pair_gap").get<double>() == Approx(2.12e-3).epsilon(5e-3));
  CHECK(d.at("enhancement").get<double>() == Approx(4.78).epsilon(1e-3));
  CHECK(d.at("numeric_peak_count").get<int>() == 2);
  CHECK(d.at("numeric_pair_gap").get<double>() == Approx(d.at("pair_gap").get<double>()).epsilon(0.05));
}

TEST_CASE("report above threshold leaves the pair quantities empty") {
  const Run r = run({"report", "--zeta-m", "-300"});
  REQUIRE(r.code == 0);
  const auto d = data_of(r);
  CHECK(d.at("pair_gap").is_null());
  CHECK(d.at("enhancement").is_null());
  CHECK(d.at("numeric_peak_count").get<int>() == 1);
}

TEST_CASE("domain errors exit 3 with a token") {
  const Run r = run({"splitting", "--zeta", "-10", "--zeta-m", "-300"});
  CHECK(r.code == 3);
  CHECK(r.out.empty());
  CHECK(r.err.rfind("coalesce-error: above_threshold: ", 0) == 0);
  CHECK(r.err.find('\n') == r.err.size() - 1);
  CHECK(run({"sensitivity", "--zeta-m", "-250"}).code == 3);
  CHECK(run({"spectrum", "--points", "1"}).code == 3);
}

TEST_CASE("parse errors exit 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"nonsense"}).code == 2);
  CHECK(run({"spectrum", "--zeta", "abc"}).code == 2);
  CHECK(run({"spectrum", "--format", "xml"}).code == 2);
  CHECK(run({"figures", "fig9"}).code == 2);
  const Run r = run({"spectrum", "--no-such-flag", "1"});
  CHECK(r.code == 2);
  CHECK(r.err.rfind("coalesce-error: parse_error: ", 0) == 0);
}

TEST_CASE("config files") {
  SUBCASE("parse") {
    const auto entries = parse_config("# comment\n\nzeta = -10  # trailing\n  zeta-m=-50\n");
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].key == "zeta");
    CHECK(entries[0].value == "-10");
    CHECK(entries[1].line == 4);
    CHECK_THROWS_AS(parse_config("zeta -10\n"), ParseError);
    CHECK_THROWS_AS(parse_config("= 3\n"), ParseError);
  }
  SUBCASE("empty file gives the defaults") {
    const auto path = temp_file("empty.cfg", "");
    const RunConfig cfg = load_config(path.string());
    const RunConfig def = default_config();
    CHECK(cfg.zeta == def.zeta);
    CHECK(cfg.zeta_m == def.zeta_m);
    CHECK(cfg.points == def.points);
    CHECK(!cfg.format.has_value());
    std::filesystem::remove(path);
  }
  SUBCASE("flags override the file") {
    const auto path = temp_file("prec.cfg", "zeta = -10\nzeta_m = -50\n");
    const Run r = run({"threshold", "--config", path.string(), "--zeta", "-12"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(r.out);
    CHECK(doc.at("params").at("zeta").get<double>() == -12.0);
    CHECK(doc.at("params").at("zeta_m").get<double>() == -50.0);
    std::filesystem::remove(path);
  }
  SUBCASE("unknown keys warn") {
    const auto path = temp_file("unknown.cfg", "zeta = -10\nbanana = 1\n");
    const Run r = run({"threshold", "--config", path.string()});
    CHECK(r.code == 0);
    CHECK(r.err.find("coalesce-warning: unknown_key:") != std::string::npos);
    std::filesystem::remove(path);
  }
  SUBCASE("malformed line exits 2") {
    const auto path = temp_file("bad.cfg", "zeta -10\n");
    const Run r = run({"threshold", "--config", path.string()});
    CHECK(r.code == 2);
    CHECK(r.err.rfind("coalesce-error: malformed_config: ", 0) == 0);
    std::filesystem::remove(path);
  }
  SUBCASE("unreadable file exits 2") {
    CHECK(run({"threshold", "--config", "/nonexistent/coalesce.cfg"}).code == 2);
  }
  SUBCASE("bad value in a file exits 2") {
    const auto path = temp_file("badvalue.cfg", "points = many\n");
    CHECK(run({"spectrum", "--config", path.string()}).code == 2);
    std::filesystem::remove(path);
  }
}

TEST_CASE("tabular subcommands") {
  SUBCASE("branches columns") {
    const Run r = run({"branches", "--x-points", "11"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(r.out);
    REQUIRE(lines.size() == 12);
    CHECK(lines[0] == "x,k_lower,k_upper,T_lower,T_upper");
  }
  SUBCASE("peaks") {
    const Run r = run({"peaks", "--zeta-m", "-50"});
    REQUIRE(r.code == 0);
    const auto lines = data_lines(r.out);
    CHECK(lines[0] == "k_peak,T_peak,hwhm");
    CHECK(lines.size() == 3);
  }
  SUBCASE("sweep-x") {
    const Run r = run({"sweep-x", "--zeta-m", "-5", "--x-points", "21", "--format", "json"});
    REQUIRE(r.code == 0);
    const auto d = data_of(r);
    CHECK(d.at("x").size() == 21);
    CHECK(d.at("T").at(10).get<double>() == Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("figures regenerate identically") {
    for (const char* fig : {"fig1", "fig2", "fig3", "threshold-sweep"}) {
      const Run a = run({"figures", fig});
      const Run b = run({"figures", fig, "--threads", "3"});
      REQUIRE(a.code == 0);
      CHECK(a.out.find("# dataset = ") != std::string::npos);
      std::string a_body = a.out;
      std::string b_body = b.out;
      a_body.erase(a_body.find("# threads"), a_body.find('\n', a_body.find("# threads")) - a_body.find("# threads"));
      b_body.erase(b_body.find("# threads"), b_body.find('\n', b_body.find("# threads")) - b_body.find("# threads"));
      CHECK(a_body == b_body);
    }
  }
}

TEST_CASE("scalar subcommands") {
  const auto stack = data_of(run({"stack", "--layers", "3", "--zeta-layer", "1"}));
  CHECK(stack.at("zeta_eff").get<double>() == Approx(7.0).epsilon(1e-6));
  CHECK(stack.at("multilayer_threshold").get<double>() == Approx(3.6840314986).epsilon(1e-9));
  const auto split = data_of(run({"splitting", "--zeta-m", "-196.6"}));
  CHECK(split.at("pair_gap").get<double>() == Approx(2.116292e-3).epsilon(1e-5));
  const auto sens = data_of(run({"sensitivity", "--mass", "1e-10", "--zeta-m", "-10"}));
  CHECK(sens.at("x_zpf").get<double>() == Approx(9.2e-16).epsilon(0.01));
  const Run csv = run({"report", "--format", "csv"});
  CHECK(data_lines(csv.out)[0] == "key,value");
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.1) == "0.1");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(-200.99751242241780) == "-200.997512422");
  CHECK(format_number(1e-20) == "1e-20");
}

TEST_CASE("output file is written whole") {
  const auto path = std::filesystem::temp_directory_path() / "coalesce_test_out.csv";
  std::filesystem::remove(path);
  const Run r = run({"spectrum", "--points", "11", "-o", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  std::stringstream text;
  text << in.rdbuf();
  CHECK(data_lines(text.str()).size() == 12);
  for (const auto& entry : std::filesystem::directory_iterator(path.parent_path())) {
    CHECK(entry.path().filename().string().find("coalesce_test_out.csv.tmp") == std::string::npos);
  }
  std::filesystem::remove(path);
  CHECK(run({"spectrum", "-o", "/nonexistent/dir/out.csv"}).code == 1);
}

TEST_CASE("executable exit codes") {
  const std::string tool = COALESCE_TOOL_PATH;
  auto status = [&](const std::string& args) {
    const int s = std::system((tool + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
  };
  CHECK(status("threshold --zeta -10") == 0);
  CHECK(status("threshold --zeta") == 2);
  CHECK(status("splitting --zeta-m -300") == 3);
}

TEST_CASE("COALESCE_THREADS sets the default thread count") {
  ::setenv("COALESCE_THREADS", "3", 1);
  CHECK(default_config().threads == 3);
  ::setenv("COALESCE_THREADS", "junk", 1);
  CHECK(default_config().threads == 0);
  ::unsetenv("COALESCE_THREADS");
  CHECK(default_config().threads == 0);
}
