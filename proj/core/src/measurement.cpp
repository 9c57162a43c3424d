#include "hops/measurement.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hops/io_util.hpp"
#include "hops/rng.hpp"
#include "stat_util.hpp"

namespace hops {

using nlohmann::json;

std::string to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::Direct:
      return "direct";
    case Scheme::Rotated45:
      return "rotated45";
    case Scheme::PhaseShiftedRotated:
      return "phase-shifted-rotated45";
  }
  return "unknown";
}

void validate(const DetectorModel& det) {
  if (!(det.efficiency > 0.0 && det.efficiency <= 1.0))
    throw std::invalid_argument(
        "DetectorModel: efficiency must lie in (0, 1]");
}

ModeAmplitudes scheme_transform(const ModeAmplitudes& amps, Scheme scheme) {
  if (amps.basis_tag != "linear")
    throw std::invalid_argument(
        "scheme_transform: amplitudes must be in the linear basis, got '" +
        amps.basis_tag + "'");
  if (scheme == Scheme::Direct) return amps;
  constexpr double r = 1.0 / std::numbers::sqrt2;
  const Complex x = amps.primary;
  const Complex y = amps.orthogonal;
  if (scheme == Scheme::Rotated45)
    return {r * (x + y), r * (y - x), "rotated45"};
  const Complex iy = Complex(0.0, 1.0) * y;
  return {r * (x + iy), -r * (x - iy), "phase-shifted-rotated45"};
}

std::vector<CountRecord> simulate_counts(const FieldEnsemble& ensemble,
                                         Scheme scheme,
                                         const DetectorModel& det,
                                         std::size_t shots_per_sample,
                                         std::uint64_t seed) {
  validate(det);
  if (shots_per_sample < 1)
    throw std::invalid_argument(
        "simulate_counts: shots_per_sample must be >= 1");
  if (ensemble.samples.empty())
    throw std::invalid_argument("simulate_counts: ensemble is empty");

  std::vector<CountRecord> records;
  records.reserve(ensemble.samples.size() * shots_per_sample);
  for (std::size_t i = 0; i < ensemble.samples.size(); ++i) {
    const ModeAmplitudes ports =
        scheme_transform(ensemble.samples[i].amplitudes, scheme);
    const double lambda1 = det.efficiency * std::norm(ports.primary);
    const double lambda2 = det.efficiency * std::norm(ports.orthogonal);
    for (std::size_t j = 0; j < shots_per_sample; ++j) {
      const std::uint64_t shot =
          static_cast<std::uint64_t>(i) * shots_per_sample + j;
      SplitMix64 gen = SplitMix64::substream(seed, shot);
      CountRecord rec;
      rec.shot_index = shot;
      rec.n1 = poisson_draw(gen, lambda1);
      rec.n2 = poisson_draw(gen, lambda2);
      records.push_back(rec);
    }
  }
  return records;
}

namespace {

EstimateReport estimate_range(const std::vector<CountRecord>& records,
                              std::size_t count, Scheme scheme) {
  std::vector<double> sums, diffs;
  sums.reserve(count);
  diffs.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double n1 = static_cast<double>(records[i].n1);
    const double n2 = static_cast<double>(records[i].n2);
    sums.push_back(n1 + n2);
    diffs.push_back(scheme == Scheme::Direct ? n2 - n1 : n1 - n2);
  }
  EstimateReport report;
  report.scheme = scheme;
  report.shots = count;
  report.mean_sum = detail::mean_of(sums);
  report.mean_diff = detail::mean_of(diffs);
  report.std_error_sum = detail::std_error_of(sums, report.mean_sum);
  report.std_error_diff = detail::std_error_of(diffs, report.mean_diff);
  return report;
}

}  // namespace

EstimateReport estimate(const std::vector<CountRecord>& records,
                        Scheme scheme) {
  if (records.empty())
    throw std::invalid_argument("estimate: no count records");
  return estimate_range(records, records.size(), scheme);
}

std::vector<EstimateReport> estimate_trace(
    const std::vector<CountRecord>& records, Scheme scheme) {
  if (records.empty())
    throw std::invalid_argument("estimate_trace: no count records");
  const std::size_t n = records.size();
  std::vector<std::size_t> checkpoints;
  for (std::size_t decade = 1;; decade *= 10) {
    for (std::size_t lead : {1, 2, 5}) {
      const std::size_t mark = lead * decade;
      if (mark > n || mark < decade) break;  // overflow-safe stop
      checkpoints.push_back(mark);
    }
    if (decade > n / 10) break;
  }
  if (checkpoints.empty() || checkpoints.back() != n)
    checkpoints.push_back(n);

  std::vector<EstimateReport> trace;
  trace.reserve(checkpoints.size());
  for (std::size_t mark : checkpoints)
    trace.push_back(estimate_range(records, mark, scheme));
  return trace;
}

std::string to_json(const EstimateReport& report) {
  json j;
  j["mean_diff"] = report.mean_diff;
  j["mean_sum"] = report.mean_sum;
  j["scheme"] = to_string(report.scheme);
  j["shots"] = report.shots;
  j["std_error_diff"] = report.std_error_diff;
  j["std_error_sum"] = report.std_error_sum;
  return j.dump(2);
}

std::string to_text(const EstimateReport& report) {
  std::ostringstream out;
  char buf[96];
  out << "count estimate, scheme " << to_string(report.scheme) << ", "
      << report.shots << " shots\n";
  std::snprintf(buf, sizeof(buf), "  mean sum   %.6g +/- %.3g\n",
                report.mean_sum, report.std_error_sum);
  out << buf;
  std::snprintf(buf, sizeof(buf), "  mean diff  %.6g +/- %.3g\n",
                report.mean_diff, report.std_error_diff);
  out << buf;
  return out.str();
}

MeasurementIdentityReport identity_audit(const FockSpace& space) {
  if (space.cutoff() < 3)
    throw std::invalid_argument("identity_audit: cutoff must be >= 3");
  constexpr double zero_tol = 1e-10;
  constexpr double apart_tol = 0.5;
  constexpr Complex i1{0.0, 1.0};
  const double r = 1.0 / std::numbers::sqrt2;

  const auto ax = ladder(Mode::X, space);
  const auto ay = ladder(Mode::Y, space);
  const auto S = stokes_ops(space);
  const auto H = hidden_ops(space);
  const auto P = safe_projector(space);

  auto number_diff = [](const TwoModeOperator& port1,
                        const TwoModeOperator& port2) {
    return adjoint(port1) * port1 - adjoint(port2) * port2;
  };
  // Rotated45 ports
  const auto d2 = number_diff(Complex(r, 0.0) * (ax + ay),
                              Complex(r, 0.0) * (ay - ax));
  // PhaseShiftedRotated ports
  const auto d3 = number_diff(Complex(r, 0.0) * (ax + i1 * ay),
                              Complex(-r, 0.0) * (ax - i1 * ay));

  auto residual = [&](const TwoModeOperator& expr) {
    return operator_norm((P * expr * P).matrix);
  };

  MeasurementIdentityReport report;
  report.cutoff = space.cutoff();
  report.safe_total = space.cutoff() - 2;

  const double d2_s2 = residual(d2 - S[2]);
  report.checks.push_back(
      {"||D2 - S2||", d2_s2, true, zero_tol, d2_s2 < zero_tol});
  const double d2_h2 = residual(d2 - H[2]);
  report.checks.push_back(
      {"||D2 - H2||", d2_h2, false, apart_tol, d2_h2 > apart_tol});
  const double d3_h3 = residual(d3 - H[3]);
  report.checks.push_back(
      {"||D3 - H3||", d3_h3, false, apart_tol, d3_h3 > apart_tol});

  report.d3_minus_s3_residual = residual(d3 - S[3]);
  report.d3_plus_s3_residual = residual(d3 + S[3]);
  const bool is_plus = report.d3_minus_s3_residual < zero_tol;
  const bool is_minus = report.d3_plus_s3_residual < zero_tol;
  report.d3_sign_unambiguous = is_plus != is_minus;
  report.d3_resolved_sign =
      report.d3_sign_unambiguous ? (is_plus ? "+" : "-") : "ambiguous";

  report.note =
      "the rotator arrangements measure the Stokes pair: D2 = S2 and D3 = " +
      (report.d3_sign_unambiguous ? report.d3_resolved_sign + std::string("S3")
                                  : std::string("?S3")) +
      " on the safe subspace, while both sit a finite distance from H2/H3. "
      "Passive linear optics conserves total photon number, so no "
      "photon-counting arrangement of this kind reproduces the "
      "pair-creating hidden observables.";

  report.all_pass = report.d3_sign_unambiguous;
  for (const auto& check : report.checks)
    report.all_pass = report.all_pass && check.pass;
  return report;
}

std::string to_json(const MeasurementIdentityReport& report) {
  json j;
  j["all_pass"] = report.all_pass;
  j["checks"] = json::array();
  for (const auto& check : report.checks) {
    j["checks"].push_back({{"label", check.label},
                           {"residual", check.residual},
                           {"expect_zero", check.expect_zero},
                           {"threshold", check.threshold},
                           {"pass", check.pass}});
  }
  j["cutoff"] = report.cutoff;
  j["d3_sign"] = {{"minus_residual", report.d3_minus_s3_residual},
                  {"plus_residual", report.d3_plus_s3_residual},
                  {"resolved_sign", report.d3_resolved_sign},
                  {"unambiguous", report.d3_sign_unambiguous}};
  j["note"] = report.note;
  j["safe_total"] = report.safe_total;
  return j.dump(2);
}

std::string to_text(const MeasurementIdentityReport& report) {
  std::ostringstream out;
  out << "detection-operator audit at cutoff " << report.cutoff
      << " (residuals on total photons <= " << report.safe_total << ")\n";
  char buf[32];
  for (const auto& check : report.checks) {
    std::snprintf(buf, sizeof(buf), "%.3e", check.residual);
    out << "  " << (check.pass ? "pass" : "FAIL") << "  " << check.label
        << " = " << buf << "  (expected "
        << (check.expect_zero ? "< " : "> ");
    std::snprintf(buf, sizeof(buf), "%.1e", check.threshold);
    out << buf << ")\n";
  }
  std::snprintf(buf, sizeof(buf), "%.3e", report.d3_minus_s3_residual);
  out << "  D3 sign vs S3: '" << report.d3_resolved_sign << "'  (||D3-S3|| = "
      << buf;
  std::snprintf(buf, sizeof(buf), "%.3e", report.d3_plus_s3_residual);
  out << ", ||D3+S3|| = " << buf << ")\n";
  out << "  " << report.note << "\n";
  out << "  overall: " << (report.all_pass ? "PASS" : "FAIL") << "\n";
  return out.str();
}

void write_counts_csv(const std::vector<CountRecord>& records, Scheme scheme,
                      std::ostream& out) {
  out << "# hops-counts scheme=" << to_string(scheme)
      << " n=" << records.size() << "\n";
  out << "shot_index,n1,n2\n";
  for (const auto& rec : records)
    out << rec.shot_index << ',' << rec.n1 << ',' << rec.n2 << '\n';
}

void write_counts_csv(const std::vector<CountRecord>& records, Scheme scheme,
                      const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_counts_csv(records, scheme, buffer);
  atomic_write_file(path, buffer.str());
}

namespace {

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string::size_type start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string::npos) {
      fields.push_back(line.substr(start));
      return fields;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::vector<CountRecord> read_counts_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind("# hops-counts", 0) != 0)
    throw CsvError("missing '# hops-counts' header", 1);
  if (!std::getline(in, line) || line != "shot_index,n1,n2")
    throw CsvError("expected column header 'shot_index,n1,n2'", 2);
  std::vector<CountRecord> records;
  std::size_t line_no = 2;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != 3)
      throw CsvError("expected 3 fields", line_no);
    CountRecord rec;
    rec.shot_index = parse_u64(fields[0], line_no);
    rec.n1 = parse_u64(fields[1], line_no);
    rec.n2 = parse_u64(fields[2], line_no);
    records.push_back(rec);
  }
  return records;
}

std::vector<CountRecord> read_counts_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in)
    throw IoError("cannot open counts file: " + path.string());
  return read_counts_csv(in);
}

void write_trace_csv(const std::vector<EstimateReport>& trace,
                     std::ostream& out) {
  out << "# hops-trace";
  if (!trace.empty()) out << " scheme=" << to_string(trace.front().scheme);
  out << "\nshots,mean_sum,std_error_sum,mean_diff,std_error_diff\n";
  for (const auto& report : trace) {
    out << report.shots << ',' << format_double(report.mean_sum) << ','
        << format_double(report.std_error_sum) << ','
        << format_double(report.mean_diff) << ','
        << format_double(report.std_error_diff) << '\n';
  }
}

void write_trace_csv(const std::vector<EstimateReport>& trace,
                     const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_trace_csv(trace, buffer);
  atomic_write_file(path, buffer.str());
}

}  // namespace hops
