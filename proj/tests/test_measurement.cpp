#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>
#include <stdexcept>

#include <hops/io_util.hpp>
#include <hops/measurement.hpp>

using hops::Complex;
using doctest::Approx;

namespace {

hops::FieldEnsemble single_sample(Complex ax, Complex ay) {
  hops::FieldEnsemble ens;
  ens.kind = hops::EnsembleKind::unpolarized();
  ens.samples.push_back({{ax, ay, "linear"}, 0});
  return ens;
}

}  // namespace

TEST_CASE("scheme transforms") {
  const double r = 1.0 / std::sqrt(2.0);
  const hops::ModeAmplitudes in{Complex{1, 0}, Complex{0, 0}, "linear"};

  SUBCASE("direct leaves the field alone") {
    const auto out = hops::scheme_transform(in, hops::Scheme::Direct);
    CHECK(out.primary == in.primary);
    CHECK(out.orthogonal == in.orthogonal);
  }
  SUBCASE("the rotator mixes the components symmetrically") {
    const auto out = hops::scheme_transform(in, hops::Scheme::Rotated45);
    CHECK(out.primary.real() == Approx(r));
    CHECK(out.orthogonal.real() == Approx(-r));
    CHECK(out.basis_tag == "rotated45");
  }
  SUBCASE("the quarter-wave shifter makes the mix complex") {
    const auto out =
        hops::scheme_transform({Complex{0, 0}, Complex{1, 0}, "linear"},
                               hops::Scheme::PhaseShiftedRotated);
    CHECK(std::abs(out.primary - Complex{0, r}) < 1e-15);
    CHECK(std::abs(out.orthogonal - Complex{0, r}) < 1e-15);
  }
  SUBCASE("every scheme preserves intensity") {
    const hops::ModeAmplitudes amps{Complex{0.6, -0.1}, Complex{0.2, 0.9},
                                    "linear"};
    for (auto scheme : {hops::Scheme::Direct, hops::Scheme::Rotated45,
                        hops::Scheme::PhaseShiftedRotated}) {
      const auto out = hops::scheme_transform(amps, scheme);
      CHECK(hops::intensity(out) == Approx(hops::intensity(amps)));
    }
  }
  SUBCASE("only linear-basis input is accepted") {
    const hops::ModeAmplitudes tagged{Complex{1, 0}, Complex{0, 0},
                                      "rotated45"};
    CHECK_THROWS_AS(hops::scheme_transform(tagged, hops::Scheme::Rotated45),
                    std::invalid_argument);
  }
}

TEST_CASE("detector validation") {
  CHECK_NOTHROW(hops::validate(hops::DetectorModel{1.0}));
  CHECK_THROWS_AS(hops::validate(hops::DetectorModel{0.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(hops::validate(hops::DetectorModel{1.5}),
                  std::invalid_argument);
}

TEST_CASE("poisson counting statistics") {
  const std::size_t shots = 10000;

  SUBCASE("a dark port never clicks, a bright port averages its intensity") {
    const auto ens = single_sample({2.0, 0.0}, {0.0, 0.0});
    const auto records = hops::simulate_counts(ens, hops::Scheme::Direct,
                                               {1.0}, shots, 11);
    REQUIRE(records.size() == shots);
    double mean1 = 0.0;
    for (const auto& rec : records) {
      CHECK(rec.n2 == 0);
      mean1 += double(rec.n1);
    }
    mean1 /= double(shots);
    // lambda = 4, so the sample mean sits within 5 sqrt(4/N)
    CHECK(mean1 == Approx(4.0).epsilon(0.03));
  }
  SUBCASE("efficiency scales the rate") {
    const auto ens = single_sample({2.0, 0.0}, {0.0, 0.0});
    const auto records = hops::simulate_counts(ens, hops::Scheme::Direct,
                                               {0.5}, shots, 11);
    double mean1 = 0.0;
    for (const auto& rec : records) mean1 += double(rec.n1);
    mean1 /= double(shots);
    CHECK(mean1 == Approx(2.0).epsilon(0.04));
  }
  SUBCASE("shot streams are seed-deterministic and indexed in order") {
    hops::FieldEnsemble ens;
    ens.kind = hops::EnsembleKind::unpolarized();
    ens.samples.push_back({{Complex{1, 0}, Complex{0.5, 0}, "linear"}, 0});
    ens.samples.push_back({{Complex{0.2, 0.4}, Complex{1, 0}, "linear"}, 1});
    const auto a = hops::simulate_counts(ens, hops::Scheme::Direct, {1.0},
                                         3, 5);
    const auto b = hops::simulate_counts(ens, hops::Scheme::Direct, {1.0},
                                         3, 5);
    REQUIRE(a.size() == 6);
    for (std::size_t i = 0; i < a.size(); ++i) {
      CHECK(a[i].shot_index == i);
      CHECK(a[i].n1 == b[i].n1);
      CHECK(a[i].n2 == b[i].n2);
    }
    const auto c = hops::simulate_counts(ens, hops::Scheme::Direct, {1.0},
                                         3, 6);
    bool any_differ = false;
    for (std::size_t i = 0; i < a.size(); ++i)
      any_differ = any_differ || a[i].n1 != c[i].n1 || a[i].n2 != c[i].n2;
    CHECK(any_differ);
  }
  SUBCASE("degenerate requests are rejected") {
    const auto ens = single_sample({1.0, 0.0}, {0.0, 0.0});
    CHECK_THROWS_AS(hops::simulate_counts(ens, hops::Scheme::Direct, {1.0},
                                          0, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(hops::simulate_counts({}, hops::Scheme::Direct, {1.0},
                                          10, 0),
                    std::invalid_argument);
    CHECK_THROWS_AS(hops::simulate_counts(ens, hops::Scheme::Direct, {2.0},
                                          10, 0),
                    std::invalid_argument);
  }
}

TEST_CASE("count estimates recover intensities") {
  SUBCASE("rotated scheme on a diagonal field") {
    // equal components: the rotator sends the whole intensity to port 1
    const auto ens = single_sample({1.0, 0.0}, {1.0, 0.0});
    const auto records = hops::simulate_counts(ens, hops::Scheme::Rotated45,
                                               {1.0}, 10000, 13);
    const auto report = hops::estimate(records, hops::Scheme::Rotated45);
    CHECK(report.shots == 10000);
    CHECK(std::abs(report.mean_diff - 2.0) <= 5.0 * report.std_error_diff);
    CHECK(std::abs(report.mean_sum - 2.0) <= 5.0 * report.std_error_sum);
  }
  SUBCASE("direct scheme on a hidden-kind ensemble") {
    const auto ens = hops::generate_ensemble(
        hops::EnsembleKind::hops(hops::pi / 2, 0.0),
        {hops::AmplitudeDist::constant(1.0), 4}, 200);
    const auto records =
        hops::simulate_counts(ens, hops::Scheme::Direct, {1.0}, 50, 17);
    const auto report = hops::estimate(records, hops::Scheme::Direct);
    // intensities: sum = a0^2 = 1, imbalance = 0
    CHECK(std::abs(report.mean_sum - 1.0) <= 5.0 * report.std_error_sum);
    CHECK(std::abs(report.mean_diff) <= 5.0 * report.std_error_diff);
  }
  SUBCASE("no records, no estimate") {
    CHECK_THROWS_AS(hops::estimate({}, hops::Scheme::Direct),
                    std::invalid_argument);
  }
}

TEST_CASE("estimate trace walks a 1-2-5 grid") {
  const auto ens = single_sample({1.0, 0.0}, {0.5, 0.5});
  const auto records =
      hops::simulate_counts(ens, hops::Scheme::Direct, {1.0}, 137, 3);
  const auto trace = hops::estimate_trace(records, hops::Scheme::Direct);
  REQUIRE(trace.size() == 8);
  const std::size_t expected[] = {1, 2, 5, 10, 20, 50, 100, 137};
  for (std::size_t i = 0; i < trace.size(); ++i)
    CHECK(trace[i].shots == expected[i]);
  // each row is the estimate over its prefix
  const auto full = hops::estimate(records, hops::Scheme::Direct);
  CHECK(trace.back().mean_sum == full.mean_sum);
}

TEST_CASE("what the difference signals measure") {
  for (int cutoff = 3; cutoff <= 8; ++cutoff) {
    INFO("cutoff ", cutoff);
    const auto report = hops::identity_audit(hops::FockSpace(cutoff));
    CHECK(report.all_pass);
    CHECK(report.d3_resolved_sign == "+");
    CHECK(report.d3_sign_unambiguous);
    for (const auto& check : report.checks) {
      INFO(check.label);
      CHECK(check.pass);
      if (check.expect_zero) CHECK(check.residual < 1e-10);
    }
  }

  SUBCASE("the gap to the pair operators is macroscopic, not roundoff") {
    const auto report = hops::identity_audit(hops::FockSpace(3));
    bool found = false;
    for (const auto& check : report.checks)
      if (check.label.find("H2") != std::string::npos) {
        found = true;
        CHECK_FALSE(check.expect_zero);
        CHECK(check.residual >= 1.0 - 1e-12);
      }
    CHECK(found);
    CHECK_FALSE(report.note.empty());
  }
  SUBCASE("needs room for the projector") {
    CHECK_THROWS_AS(hops::identity_audit(hops::FockSpace(2)),
                    std::invalid_argument);
  }
}

TEST_CASE("counts csv round trip") {
  const auto ens = single_sample({1.0, 0.0}, {0.5, 0.5});
  const auto records =
      hops::simulate_counts(ens, hops::Scheme::Rotated45, {1.0}, 25, 9);

  std::ostringstream out;
  hops::write_counts_csv(records, hops::Scheme::Rotated45, out);
  std::istringstream in(out.str());
  const auto back = hops::read_counts_csv(in);

  REQUIRE(back.size() == records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].shot_index == records[i].shot_index);
    CHECK(back[i].n1 == records[i].n1);
    CHECK(back[i].n2 == records[i].n2);
  }

  SUBCASE("reader rejects foreign headers") {
    std::istringstream bad("# hops-ensemble kind=hops\nshot_index,n1,n2\n");
    try {
      hops::read_counts_csv(bad);
      FAIL("expected CsvError");
    } catch (const hops::CsvError& e) {
      CHECK(e.line == 1);
    }
  }
  SUBCASE("reader rejects short rows") {
    std::istringstream bad(
        "# hops-counts scheme=direct n=1\nshot_index,n1,n2\n0,1\n");
    try {
      hops::read_counts_csv(bad);
      FAIL("expected CsvError");
    } catch (const hops::CsvError& e) {
      CHECK(e.line == 3);
    }
  }
}

TEST_CASE("trace csv carries the convergence columns") {
  const auto ens = single_sample({1.0, 0.0}, {0.0, 1.0});
  const auto records =
      hops::simulate_counts(ens, hops::Scheme::Direct, {1.0}, 20, 1);
  const auto trace = hops::estimate_trace(records, hops::Scheme::Direct);

  std::ostringstream out;
  hops::write_trace_csv(trace, out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("# hops-trace scheme=direct", 0) == 0);
  std::getline(in, line);
  CHECK(line == "shots,mean_sum,std_error_sum,mean_diff,std_error_diff");
  std::size_t rows = 0;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == trace.size());
}
