#include "hops/ensemble.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "hops/io_util.hpp"
#include "hops/rng.hpp"
#include "stat_util.hpp"

namespace hops {

using nlohmann::json;

AmplitudeDist AmplitudeDist::constant(double a0) {
  AmplitudeDist d;
  d.law = Law::Constant;
  d.a0 = a0;
  return d;
}

AmplitudeDist AmplitudeDist::uniform(double lo, double hi) {
  AmplitudeDist d;
  d.law = Law::Uniform;
  d.lo = lo;
  d.hi = hi;
  return d;
}

AmplitudeDist AmplitudeDist::rayleigh(double scale) {
  AmplitudeDist d;
  d.law = Law::Rayleigh;
  d.scale = scale;
  return d;
}

void validate(const AmplitudeDist& dist) {
  switch (dist.law) {
    case AmplitudeDist::Law::Constant:
      if (!(dist.a0 >= 0.0) || !std::isfinite(dist.a0))
        throw std::invalid_argument(
            "AmplitudeDist: a0 must be finite and >= 0");
      break;
    case AmplitudeDist::Law::Uniform:
      if (!(dist.lo >= 0.0) || !std::isfinite(dist.lo) ||
          !std::isfinite(dist.hi) || !(dist.lo < dist.hi))
        throw std::invalid_argument(
            "AmplitudeDist: uniform needs 0 <= lo < hi, both finite");
      break;
    case AmplitudeDist::Law::Rayleigh:
      if (!(dist.scale > 0.0) || !std::isfinite(dist.scale))
        throw std::invalid_argument(
            "AmplitudeDist: rayleigh scale must be finite and > 0");
      break;
  }
}

EnsembleKind EnsembleKind::polarized(double chi, double delta) {
  EnsembleKind k;
  k.tag = Tag::Polarized;
  k.chi = chi;
  k.delta = delta;
  return k;
}

EnsembleKind EnsembleKind::hops(double chi_h, double delta_h) {
  EnsembleKind k;
  k.tag = Tag::Hops;
  k.chi = chi_h;
  k.delta = delta_h;
  return k;
}

EnsembleKind EnsembleKind::unpolarized() { return EnsembleKind{}; }

std::string to_string(EnsembleKind::Tag tag) {
  switch (tag) {
    case EnsembleKind::Tag::Polarized: return "polarized";
    case EnsembleKind::Tag::Hops: return "hops";
    case EnsembleKind::Tag::Unpolarized: return "unpolarized";
  }
  return "unpolarized";
}

namespace {

void validate_kind(const EnsembleKind& kind) {
  if (kind.tag == EnsembleKind::Tag::Unpolarized) return;
  const bool hops_kind = kind.tag == EnsembleKind::Tag::Hops;
  const char* chi_name = hops_kind ? "chi_h" : "chi";
  const char* delta_name = hops_kind ? "delta_h" : "delta";
  if (!(kind.chi >= 0.0 && kind.chi <= pi))
    throw std::invalid_argument(std::string("EnsembleKind: ") + chi_name +
                                " must lie in [0, pi]");
  if (!(kind.delta > -pi && kind.delta <= pi))
    throw std::invalid_argument(std::string("EnsembleKind: ") + delta_name +
                                " must lie in (-pi, pi]");
}

double draw_amplitude(const AmplitudeDist& dist, SplitMix64& gen) {
  switch (dist.law) {
    case AmplitudeDist::Law::Constant: return dist.a0;
    case AmplitudeDist::Law::Uniform:
      return uniform_draw(gen, dist.lo, dist.hi);
    case AmplitudeDist::Law::Rayleigh:
      return rayleigh_draw(gen, dist.scale);
  }
  return 0.0;
}

}  // namespace

FieldEnsemble generate_ensemble(const EnsembleKind& kind,
                                const RandomnessSpec& spec, std::size_t n) {
  validate_kind(kind);
  validate(spec.amplitude_dist);
  if (n == 0)
    throw std::invalid_argument("generate_ensemble: n must be >= 1");

  FieldEnsemble ensemble;
  ensemble.kind = kind;
  ensemble.spec = spec;
  ensemble.samples.reserve(n);

  for (std::size_t i = 0; i < n; ++i) {
    SplitMix64 gen = SplitMix64::substream(spec.seed, i);
    FieldSample sample;
    sample.draw_index = i;
    switch (kind.tag) {
      case EnsembleKind::Tag::Polarized: {
        const double a0 = draw_amplitude(spec.amplitude_dist, gen);
        const double phi_bar = gen.next_phase();
        sample.amplitudes =
            amplitudes_from_polar({a0, kind.chi, kind.delta, phi_bar});
        break;
      }
      case EnsembleKind::Tag::Hops: {
        const double a0 = draw_amplitude(spec.amplitude_dist, gen);
        const double phi = gen.next_phase();
        sample.amplitudes =
            amplitudes_from_hops({a0, kind.chi, kind.delta, phi});
        break;
      }
      case EnsembleKind::Tag::Unpolarized: {
        // draw order: both amplitudes, then both phases
        const double ax = draw_amplitude(spec.amplitude_dist, gen);
        const double ay = draw_amplitude(spec.amplitude_dist, gen);
        const double px = gen.next_phase();
        const double py = gen.next_phase();
        sample.amplitudes.primary = std::polar(ax, px);
        sample.amplitudes.orthogonal = std::polar(ay, py);
        break;
      }
    }
    ensemble.samples.push_back(std::move(sample));
  }
  return ensemble;
}

namespace {

struct MomentVectors {
  std::vector<double> v0, v1, v2, v3;
};

// v0 = |A_y|^2 + |A_x|^2, v1 = |A_y|^2 - |A_x|^2, (v2, v3) = 2 A_y A_x* or
// 2 A_y A_x depending on `conjugate`.
MomentVectors per_sample_moments(const FieldEnsemble& ensemble,
                                 bool conjugate) {
  const std::size_t n = ensemble.samples.size();
  MomentVectors m;
  m.v0.resize(n);
  m.v1.resize(n);
  m.v2.resize(n);
  m.v3.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ensemble.samples[i].amplitudes;
    const double ix = std::norm(a.primary);
    const double iy = std::norm(a.orthogonal);
    const Complex cross =
        2.0 * a.orthogonal * (conjugate ? std::conj(a.primary) : a.primary);
    m.v0[i] = iy + ix;
    m.v1[i] = iy - ix;
    m.v2[i] = cross.real();
    m.v3[i] = cross.imag();
  }
  return m;
}

}  // namespace

ClassicalStokes classical_stokes(const FieldEnsemble& ensemble) {
  const auto m = per_sample_moments(ensemble, /*conjugate=*/true);
  ClassicalStokes out;
  out.n = ensemble.samples.size();
  out.s0 = detail::mean_of(m.v0);
  out.s1 = detail::mean_of(m.v1);
  out.s2 = detail::mean_of(m.v2);
  out.s3 = detail::mean_of(m.v3);
  out.std_error = {detail::std_error_of(m.v0, out.s0),
                   detail::std_error_of(m.v1, out.s1),
                   detail::std_error_of(m.v2, out.s2),
                   detail::std_error_of(m.v3, out.s3)};
  return out;
}

ClassicalHidden classical_hidden(const FieldEnsemble& ensemble) {
  const auto m = per_sample_moments(ensemble, /*conjugate=*/false);
  ClassicalHidden out;
  out.n = ensemble.samples.size();
  out.h0 = detail::mean_of(m.v0);
  out.h1 = detail::mean_of(m.v1);
  out.h2 = detail::mean_of(m.v2);
  out.h3 = detail::mean_of(m.v3);
  out.std_error = {detail::std_error_of(m.v0, out.h0),
                   detail::std_error_of(m.v1, out.h1),
                   detail::std_error_of(m.v2, out.h2),
                   detail::std_error_of(m.v3, out.h3)};
  return out;
}

std::string to_string(PolarizationClass c) {
  switch (c) {
    case PolarizationClass::Polarized: return "polarized";
    case PolarizationClass::HiddenPolarized: return "hidden-polarized";
    case PolarizationClass::Neither: return "neither";
  }
  return "neither";
}

RandomnessAudit randomness_audit(const FieldEnsemble& ensemble,
                                 double nonrandom_threshold) {
  const std::size_t n = ensemble.samples.size();
  if (n < 2)
    throw std::invalid_argument("randomness_audit: need at least 2 samples");

  std::vector<double> ratios;
  ratios.reserve(n);
  std::vector<double> diffs(n), sums(n);
  std::size_t infinite = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = ensemble.samples[i].amplitudes;
    const double mag_x = std::abs(a.primary);
    const double mag_y = std::abs(a.orthogonal);
    if (mag_x == 0.0) {
      ++infinite;
    } else {
      ratios.push_back(mag_y / mag_x);
    }
    const double px = phase_of(a.primary);
    const double py = phase_of(a.orthogonal);
    diffs[i] = py - px;
    sums[i] = py + px;
  }

  RandomnessAudit audit;
  audit.n = n;
  audit.threshold = nonrandom_threshold;
  audit.infinite_ratio_count = infinite;
  audit.ratio_mean = detail::mean_of(ratios);
  audit.ratio_variance = detail::sample_variance(ratios, audit.ratio_mean);
  audit.diff_circular_variance = detail::circular_stats(diffs).variance;
  audit.sum_circular_variance = detail::circular_stats(sums).variance;

  const bool ratio_fixed =
      ratios.size() >= 2 && audit.ratio_variance <= nonrandom_threshold;
  const bool diff_fixed = audit.diff_circular_variance <= nonrandom_threshold;
  const bool sum_fixed = audit.sum_circular_variance <= nonrandom_threshold;
  if (ratio_fixed && diff_fixed) {
    audit.classification = PolarizationClass::Polarized;
  } else if (ratio_fixed && sum_fixed) {
    audit.classification = PolarizationClass::HiddenPolarized;
  } else {
    audit.classification = PolarizationClass::Neither;
  }
  return audit;
}

std::string to_json(const RandomnessAudit& audit) {
  json j;
  j["classification"] = to_string(audit.classification);
  j["diff_circular_variance"] = audit.diff_circular_variance;
  j["infinite_ratio_count"] = audit.infinite_ratio_count;
  j["n"] = audit.n;
  j["ratio_mean"] = audit.ratio_mean;
  j["ratio_variance"] = audit.ratio_variance;
  j["sum_circular_variance"] = audit.sum_circular_variance;
  j["threshold"] = audit.threshold;
  return j.dump(2);
}

std::string to_text(const RandomnessAudit& audit) {
  std::ostringstream out;
  out << "randomness audit over " << audit.n << " samples\n";
  out << "  amplitude ratio |A_y|/|A_x|: mean "
      << format_double(audit.ratio_mean) << ", variance "
      << format_double(audit.ratio_variance);
  if (audit.infinite_ratio_count > 0)
    out << "  (" << audit.infinite_ratio_count
        << " samples with A_x = 0 excluded)";
  out << "\n";
  out << "  phase difference circular variance: "
      << format_double(audit.diff_circular_variance) << "\n";
  out << "  phase sum circular variance:        "
      << format_double(audit.sum_circular_variance) << "\n";
  out << "  classification: " << to_string(audit.classification)
      << "  (non-random means variance <= "
      << format_double(audit.threshold) << ")\n";
  return out.str();
}

namespace {

std::string stat_line(const char* name, double value, double err) {
  std::ostringstream out;
  out << "  " << name << " = " << format_double(value)
      << "   (std error " << format_double(err) << ")\n";
  return out.str();
}

}  // namespace

std::string to_json(const ClassicalStokes& stokes) {
  json j;
  j["n"] = stokes.n;
  j["s0"] = stokes.s0;
  j["s1"] = stokes.s1;
  j["s2"] = stokes.s2;
  j["s3"] = stokes.s3;
  j["std_error"] = stokes.std_error;
  return j.dump(2);
}

std::string to_text(const ClassicalStokes& stokes) {
  std::ostringstream out;
  out << "classical Stokes parameters (n = " << stokes.n << ")\n";
  out << stat_line("s0", stokes.s0, stokes.std_error[0]);
  out << stat_line("s1", stokes.s1, stokes.std_error[1]);
  out << stat_line("s2", stokes.s2, stokes.std_error[2]);
  out << stat_line("s3", stokes.s3, stokes.std_error[3]);
  return out.str();
}

std::string to_json(const ClassicalHidden& hidden) {
  json j;
  j["h0"] = hidden.h0;
  j["h1"] = hidden.h1;
  j["h2"] = hidden.h2;
  j["h3"] = hidden.h3;
  j["n"] = hidden.n;
  j["std_error"] = hidden.std_error;
  return j.dump(2);
}

std::string to_text(const ClassicalHidden& hidden) {
  std::ostringstream out;
  out << "classical hidden-polarization parameters (n = " << hidden.n
      << ")\n";
  out << stat_line("h0", hidden.h0, hidden.std_error[0]);
  out << stat_line("h1", hidden.h1, hidden.std_error[1]);
  out << stat_line("h2", hidden.h2, hidden.std_error[2]);
  out << stat_line("h3", hidden.h3, hidden.std_error[3]);
  return out.str();
}

namespace {

constexpr const char* kEnsembleMagic = "# hops-ensemble";
constexpr const char* kColumnHeader = "re_ax,im_ax,re_ay,im_ay";

std::string dist_tokens(const AmplitudeDist& dist) {
  switch (dist.law) {
    case AmplitudeDist::Law::Constant:
      return "dist=constant a0=" + format_double(dist.a0);
    case AmplitudeDist::Law::Uniform:
      return "dist=uniform lo=" + format_double(dist.lo) +
             " hi=" + format_double(dist.hi);
    case AmplitudeDist::Law::Rayleigh:
      return "dist=rayleigh scale=" + format_double(dist.scale);
  }
  return {};
}

std::map<std::string, std::string> parse_header_tokens(
    const std::string& line) {
  std::map<std::string, std::string> kv;
  std::istringstream in(line.substr(std::string(kEnsembleMagic).size()));
  std::string token;
  while (in >> token) {
    const auto eq = token.find('=');
    if (eq == std::string::npos)
      throw CsvError("malformed header token '" + token + "'", 1);
    kv[token.substr(0, eq)] = token.substr(eq + 1);
  }
  return kv;
}

std::string require_token(const std::map<std::string, std::string>& kv,
                          const std::string& key) {
  const auto it = kv.find(key);
  if (it == kv.end())
    throw CsvError("ensemble header is missing '" + key + "'", 1);
  return it->second;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace

void write_ensemble_csv(const FieldEnsemble& ensemble, std::ostream& out) {
  out << kEnsembleMagic << " kind=" << to_string(ensemble.kind.tag);
  switch (ensemble.kind.tag) {
    case EnsembleKind::Tag::Polarized:
      out << " chi=" << format_double(ensemble.kind.chi)
          << " delta=" << format_double(ensemble.kind.delta);
      break;
    case EnsembleKind::Tag::Hops:
      out << " chi_h=" << format_double(ensemble.kind.chi)
          << " delta_h=" << format_double(ensemble.kind.delta);
      break;
    case EnsembleKind::Tag::Unpolarized:
      break;
  }
  out << " " << dist_tokens(ensemble.spec.amplitude_dist);
  const std::string basis_tag = ensemble.samples.empty()
                                    ? std::string("linear")
                                    : ensemble.samples.front().amplitudes.basis_tag;
  out << " basis=" << basis_tag;
  out << " seed=" << ensemble.spec.seed;
  out << " n=" << ensemble.samples.size() << "\n";
  out << kColumnHeader << "\n";
  for (const auto& sample : ensemble.samples) {
    const auto& a = sample.amplitudes;
    out << format_double(a.primary.real()) << ','
        << format_double(a.primary.imag()) << ','
        << format_double(a.orthogonal.real()) << ','
        << format_double(a.orthogonal.imag()) << '\n';
  }
}

void write_ensemble_csv(const FieldEnsemble& ensemble,
                        const std::filesystem::path& path) {
  std::ostringstream buffer;
  write_ensemble_csv(ensemble, buffer);
  atomic_write_file(path, buffer.str());
}

FieldEnsemble read_ensemble_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line.rfind(kEnsembleMagic, 0) != 0)
    throw CsvError(std::string("expected a '") + kEnsembleMagic +
                       "' header line",
                   1);
  const auto kv = parse_header_tokens(line);

  FieldEnsemble ensemble;
  const std::string kind = require_token(kv, "kind");
  try {
    if (kind == "polarized") {
      ensemble.kind = EnsembleKind::polarized(
          parse_double(require_token(kv, "chi"), 1),
          parse_double(require_token(kv, "delta"), 1));
    } else if (kind == "hops") {
      ensemble.kind = EnsembleKind::hops(
          parse_double(require_token(kv, "chi_h"), 1),
          parse_double(require_token(kv, "delta_h"), 1));
    } else if (kind == "unpolarized") {
      ensemble.kind = EnsembleKind::unpolarized();
    } else {
      throw CsvError("unknown ensemble kind '" + kind + "'", 1);
    }
    validate_kind(ensemble.kind);

    const auto dist_it = kv.find("dist");
    if (dist_it == kv.end() || dist_it->second == "constant") {
      ensemble.spec.amplitude_dist = AmplitudeDist::constant(
          kv.count("a0") ? parse_double(kv.at("a0"), 1) : 1.0);
    } else if (dist_it->second == "uniform") {
      ensemble.spec.amplitude_dist =
          AmplitudeDist::uniform(parse_double(require_token(kv, "lo"), 1),
                                 parse_double(require_token(kv, "hi"), 1));
    } else if (dist_it->second == "rayleigh") {
      ensemble.spec.amplitude_dist =
          AmplitudeDist::rayleigh(parse_double(require_token(kv, "scale"), 1));
    } else {
      throw CsvError("unknown amplitude law '" + dist_it->second + "'", 1);
    }
    validate(ensemble.spec.amplitude_dist);
  } catch (const std::invalid_argument& e) {
    throw CsvError(e.what(), 1);
  }
  if (kv.count("seed")) ensemble.spec.seed = parse_u64(kv.at("seed"), 1);
  const std::string basis_tag =
      kv.count("basis") ? kv.at("basis") : std::string("linear");

  if (!std::getline(in, line) || line != kColumnHeader)
    throw CsvError(std::string("expected column header '") + kColumnHeader +
                       "'",
                   2);

  std::size_t line_number = 2;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 4)
      throw CsvError("expected 4 comma-separated fields", line_number);
    FieldSample sample;
    sample.amplitudes.primary = Complex(parse_double(fields[0], line_number),
                                        parse_double(fields[1], line_number));
    sample.amplitudes.orthogonal =
        Complex(parse_double(fields[2], line_number),
                parse_double(fields[3], line_number));
    sample.amplitudes.basis_tag = basis_tag;
    sample.draw_index = ensemble.samples.size();
    ensemble.samples.push_back(std::move(sample));
  }

  if (ensemble.samples.empty())
    throw CsvError("ensemble file contains no samples", line_number);
  if (kv.count("n")) {
    const std::uint64_t declared = parse_u64(kv.at("n"), 1);
    if (declared != ensemble.samples.size())
      throw CsvError("header declares n=" + kv.at("n") + " but file has " +
                         std::to_string(ensemble.samples.size()) + " rows",
                     line_number);
  }
  return ensemble;
}

FieldEnsemble read_ensemble_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "' for reading");
  return read_ensemble_csv(in);
}

}  // namespace hops
