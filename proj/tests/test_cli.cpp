#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef HOPS_CLI_PATH
#error "HOPS_CLI_PATH must point at the built binary"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct RunResult {
  int code = -1;
  std::string out;
  std::string err;
};

const fs::path& work_dir() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() /
             ("hops-cli-test-" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run(const std::string& args) {
  const fs::path out_file = work_dir() / "stdout.txt";
  const fs::path err_file = work_dir() / "stderr.txt";
  const std::string cmd = std::string(HOPS_CLI_PATH) + " " + args + " > " +
                          out_file.string() + " 2> " + err_file.string();
  const int status = std::system(cmd.c_str());
  RunResult result;
  result.code = (status >= 0 && WIFEXITED(status)) ? WEXITSTATUS(status)
                                                   : -1;
  result.out = slurp(out_file);
  result.err = slurp(err_file);
  return result;
}

std::string path_of(const std::string& name) {
  return (work_dir() / name).string();
}

}  // namespace

TEST_CASE("version flag") {
  const auto r = run("--version");
  CHECK(r.code == 0);
  CHECK(r.out.find("1.0") != std::string::npos);
}

TEST_CASE("generate writes a self-describing, reproducible artifact") {
  const std::string ens = path_of("gen.csv");
  const std::string cmd = "generate --kind hops --chi-h 1.0471975511965976 "
                          "--delta-h 0.5 --n 200 --seed 9 --out " + ens;

  const auto first = run(cmd);
  REQUIRE(first.code == 0);
  CHECK(first.out.find("200") != std::string::npos);
  REQUIRE(fs::exists(ens));
  REQUIRE(fs::exists(ens + ".meta.json"));

  const std::string bytes = slurp(ens);
  const std::string meta_bytes = slurp(ens + ".meta.json");

  SUBCASE("rerunning with the same flags is byte-identical") {
    const auto second = run(cmd);
    CHECK(second.code == 0);
    CHECK(slurp(ens) == bytes);
    CHECK(slurp(ens + ".meta.json") == meta_bytes);
    CHECK(second.out == first.out);
  }
  SUBCASE("the sidecar records parameters, seed, and version") {
    const json meta = json::parse(meta_bytes);
    CHECK(meta.at("command") == "generate");
    CHECK(meta.at("kind") == "hops");
    CHECK(meta.at("seed") == 9);
    CHECK(meta.at("n") == 200);
    CHECK(meta.at("params").at("delta_h") == 0.5);
    CHECK(meta.contains("version"));
  }
}

TEST_CASE("generate rejects inconsistent flag sets") {
  CHECK(run("generate --kind hops --n 10 --out " + path_of("x.csv")).code ==
        2);
  CHECK(run("generate --kind polarized --chi-h 1 --delta-h 0 --n 10 --out " +
            path_of("x.csv")).code == 2);
  CHECK(run("generate --kind unpolarized --chi 1 --n 10 --out " +
            path_of("x.csv")).code == 2);
  CHECK(run("generate --kind hops --chi-h 1 --delta-h 0 --n 0 --out " +
            path_of("x.csv")).code == 2);
  CHECK(run("generate --kind hops --chi-h 1 --delta-h 0 --n 5 "
            "--a0 2 --a0-rayleigh 1 --out " + path_of("x.csv")).code == 2);
}

TEST_CASE("stokes and hidden reports") {
  const std::string pol = path_of("xpol.csv");
  REQUIRE(run("generate --kind polarized --chi 0 --delta 0 --n 300 --seed 2 "
              "--out " + pol).code == 0);

  SUBCASE("x-polarized light pins the full stokes vector") {
    const auto r = run("stokes --in " + pol + " --json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("s0").get<double>() == doctest::Approx(1.0));
    CHECK(j.at("s1").get<double>() == doctest::Approx(-1.0));
    CHECK(j.at("n") == 300);
  }
  SUBCASE("hidden report on a hidden-kind ensemble") {
    const std::string hid = path_of("hid.csv");
    REQUIRE(run("generate --kind hops --chi-h 1.0471975511965976 "
                "--delta-h 0 --n 300 --seed 2 --out " + hid).code == 0);
    const auto r = run("hidden --in " + hid + " --json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("h1").get<double>() == doctest::Approx(-0.5));
    CHECK(j.at("h2").get<double>() ==
          doctest::Approx(std::sin(1.0471975511965976)));
  }
  SUBCASE("text report mentions the components") {
    const auto r = run("stokes --in " + pol);
    CHECK(r.code == 0);
    CHECK(r.out.find("s1") != std::string::npos);
  }
}

TEST_CASE("io failures map to distinct exit codes") {
  CHECK(run("stokes --in " + path_of("absent.csv")).code == 3);

  const std::string garbage = path_of("garbage.csv");
  std::ofstream(garbage) << "not,a,hops,file\n";
  CHECK(run("stokes --in " + garbage).code == 2);
}

TEST_CASE("verify command") {
  SUBCASE("the full battery passes at the default cutoff") {
    const auto r = run("verify --cutoff 6 --json");
    REQUIRE(r.code == 0);
    const json j = json::parse(r.out);
    CHECK(j.at("all_pass") == true);
    CHECK(j.at("algebra").at("h0h2_sign").at("resolved_sign") == "-");
    CHECK(j.at("detection").at("d3_sign").at("resolved_sign") == "+");
  }
  SUBCASE("cutoffs outside the supported range are usage errors") {
    CHECK(run("verify --cutoff 11").code == 2);
    CHECK(run("verify --cutoff 2").code == 2);
  }
  SUBCASE("cutoff 3 cannot resolve the commutator sign and says so") {
    // total <= 1 has no room for pair excitations, so both sign candidates
    // vanish and the battery reports a verification failure, not success
    const auto r = run("verify --cutoff 3 --json");
    CHECK(r.code == 1);
    const json j = json::parse(r.out);
    CHECK(j.at("algebra").at("h0h2_sign").at("resolved_sign") == "ambiguous");
    CHECK(j.at("detection").at("all_pass") == true);
  }
  SUBCASE("operator dumps land in the requested directory") {
    const fs::path dump = work_dir() / "ops";
    fs::create_directories(dump);
    REQUIRE(run("verify --cutoff 4 --dump-operators " + dump.string()).code ==
            0);
    for (const char* name : {"s0.csv", "s1.csv", "s2.csv", "s3.csv",
                             "h0.csv", "h1.csv", "h2.csv", "h3.csv"})
      CHECK(fs::exists(dump / name));
  }
}

TEST_CASE("pcmi command and round trip") {
  const std::string pol = path_of("pcmi-in.csv");
  REQUIRE(run("generate --kind polarized --chi 1.5707963267948966 "
              "--delta 0.7853981633974483 --a0-rayleigh 1 --n 400 --seed 5 "
              "--out " + pol).code == 0);

  const std::string hid = path_of("pcmi-out.csv");
  const auto conv = run("pcmi --in " + pol + " --out " + hid + " --json");
  REQUIRE(conv.code == 0);
  const json cert = json::parse(conv.out);
  CHECK(cert.at("pass") == true);
  CHECK(cert.at("audit").at("classification") == "hidden-polarized");
  CHECK(fs::exists(hid + ".meta.json"));

  SUBCASE("a second pass reports the restored classification") {
    const std::string back = path_of("pcmi-back.csv");
    const auto r = run("pcmi --in " + hid + " --out " + back + " --json");
    REQUIRE(r.code == 0);
    const json audit = json::parse(r.out);
    CHECK(audit.at("classification") == "polarized");
  }
  SUBCASE("device phases outside (-pi, pi] are usage errors") {
    CHECK(run("pcmi --in " + pol + " --delta-m 4").code == 2);
  }
  SUBCASE("unpolarized input has nothing to convert") {
    const std::string unp = path_of("unp.csv");
    REQUIRE(run("generate --kind unpolarized --n 50 --seed 1 --out " +
                unp).code == 0);
    CHECK(run("pcmi --in " + unp).code == 2);
  }
}

TEST_CASE("measure command") {
  const std::string ens = path_of("meas-in.csv");
  REQUIRE(run("generate --kind hops --chi-h 1.5707963267948966 --delta-h 0 "
              "--n 50 --seed 12 --out " + ens).code == 0);

  const std::string counts = path_of("counts.csv");
  const std::string trace = path_of("trace.csv");
  const std::string cmd = "measure --in " + ens +
                          " --scheme rotated45 --shots-per-sample 20 "
                          "--seed 3 --out " + counts + " --trace " + trace;

  const auto first = run(cmd);
  REQUIRE(first.code == 0);
  REQUIRE(fs::exists(counts));
  REQUIRE(fs::exists(trace));
  REQUIRE(fs::exists(counts + ".meta.json"));

  SUBCASE("rerun is byte-identical across all artifacts") {
    const std::string counts_bytes = slurp(counts);
    const std::string trace_bytes = slurp(trace);
    const std::string meta_bytes = slurp(counts + ".meta.json");
    const auto second = run(cmd);
    CHECK(second.code == 0);
    CHECK(slurp(counts) == counts_bytes);
    CHECK(slurp(trace) == trace_bytes);
    CHECK(slurp(counts + ".meta.json") == meta_bytes);
    CHECK(second.out == first.out);
  }
  SUBCASE("usage validation") {
    CHECK(run("measure --in " + ens + " --shots-per-sample 0 --out " +
              path_of("c2.csv")).code == 2);
    CHECK(run("measure --in " + ens + " --scheme sideways --out " +
              path_of("c2.csv")).code == 2);
    CHECK(run("measure --in " + ens + " --efficiency 1.5 --out " +
              path_of("c2.csv")).code == 2);
  }
}
