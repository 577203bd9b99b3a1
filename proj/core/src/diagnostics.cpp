#include "mdkit/diagnostics.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "mdkit/parallel.hpp"

namespace mdkit {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& s) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number in CSV: '" + s + "'");
  }
  return v;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

TimeSeries::TimeSeries(std::vector<std::string> extra_names)
    : extra_names_(std::move(extra_names)) {}

void TimeSeries::add(Row row) {
  if (!rows_.empty() && !(row.t > rows_.back().t)) {
    throw std::invalid_argument("TimeSeries: times must increase strictly");
  }
  row.extra.resize(extra_names_.size(), std::numeric_limits<double>::quiet_NaN());
  rows_.push_back(std::move(row));
}

void TimeSeries::write_csv(std::ostream& os) const {
  os << "t,charge,gauge_residual,l2_error,linf_error";
  for (const auto& n : extra_names_) os << ',' << n;
  os << '\n';
  for (const auto& r : rows_) {
    os << format_double(r.t) << ',' << format_double(r.charge) << ','
       << format_double(r.gauge_residual) << ',' << format_double(r.l2_error) << ','
       << format_double(r.linf_error);
    for (double e : r.extra) os << ',' << format_double(e);
    os << '\n';
  }
}

TimeSeries TimeSeries::read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw std::invalid_argument("empty CSV");
  const auto header = split_csv_line(line);
  static const char* fixed[] = {"t", "charge", "gauge_residual", "l2_error", "linf_error"};
  if (header.size() < 5) throw std::invalid_argument("CSV header too short");
  for (int i = 0; i < 5; ++i) {
    if (header[i] != fixed[i]) throw std::invalid_argument("unexpected CSV column " + header[i]);
  }
  TimeSeries ts(std::vector<std::string>(header.begin() + 5, header.end()));
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != header.size()) throw std::invalid_argument("ragged CSV row");
    Row r;
    r.t = parse_double(cells[0]);
    r.charge = parse_double(cells[1]);
    r.gauge_residual = parse_double(cells[2]);
    r.l2_error = parse_double(cells[3]);
    r.linf_error = parse_double(cells[4]);
    for (std::size_t i = 5; i < cells.size(); ++i) r.extra.push_back(parse_double(cells[i]));
    ts.add(std::move(r));
  }
  return ts;
}

Vec3 plane_wave_wavenumber(const GridSpec& grid, const std::array<int, 3>& k) {
  return {2.0 * M_PI * k[0] / grid.length(0), 2.0 * M_PI * k[1] / grid.length(1),
          2.0 * M_PI * k[2] / grid.length(2)};
}

PlaneWave exact_plane_wave(double t, const GridSpec& grid, const Vec3& xi0, bool allow_aliased) {
  for (int j = 0; j < 3; ++j) {
    const double k = xi0[j] * grid.length(j) / (2.0 * M_PI);
    const double kr = std::round(k);
    if (std::abs(k - kr) > 1e-9 * std::max(1.0, std::abs(k))) {
      throw GridError("exact_plane_wave: xi0 is not a wavenumber of the periodic box");
    }
    const int n = grid.n()[j];
    if (!allow_aliased && (kr < -n / 2 || kr > n / 2 - 1)) {
      throw GridError("exact_plane_wave: xi0 is not resolved by the grid (aliased)");
    }
  }
  const double xi2 = xi0[0] * xi0[0] + xi0[1] * xi0[1] + xi0[2] * xi0[2];
  const double lam = std::sqrt(1.0 + xi2);
  const double norm = 1.0 / std::sqrt(2.0 * (1.0 + xi2 - lam));
  const Spinor chi{xi0[2] * norm, Complex(xi0[0], xi0[1]) * norm, (lam - 1.0) * norm, 0.0};

  PlaneWave out{SpinorField(grid, t), PotentialState(grid, t)};
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t ii = 0; ii < n; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    const Vec3 x = grid.point(i);
    const Complex e = std::polar(1.0, xi0[0] * x[0] + xi0[1] * x[1] + xi0[2] * x[2] - t * lam);
    for (int c = 0; c < 4; ++c) out.psi.at(i, c) = e * chi[c];
    out.pot.v[i] = 0.5 * t * t;
    out.pot.v_t[i] = t;
    for (int k = 0; k < 3; ++k) {
      out.pot.a[k][i] = 0.5 * t * t * xi0[k] / lam;
      out.pot.a_t[k][i] = t * xi0[k] / lam;
    }
  }
  return out;
}

ExternalFields plane_wave_external(const Vec3& xi0) {
  const double lam = lambda0(xi0);
  ExternalFields ext;
  ext.v_ex = [](double t, const Vec3&) { return -0.5 * t * t; };
  ext.a_ex = [xi0, lam](double t, const Vec3&) {
    const double s = -0.5 * t * t / lam;
    return Vec3{s * xi0[0], s * xi0[1], s * xi0[2]};
  };
  return ext;
}

double gauge_residual(const Fft& fft, const PotentialState& pot, double delta) {
  const GridSpec& grid = fft.grid();
  if (!(pot.grid == grid)) throw std::invalid_argument("gauge_residual: grid mismatch");
  const std::size_t n = grid.size();
  ComplexField f(4 * n);
  ComplexField v(pot.v.begin(), pot.v.end());
  for (std::size_t i = 0; i < n; ++i) {
    f[4 * i] = pot.v_t[i];
    for (int k = 0; k < 3; ++k) f[4 * i + 1 + k] = pot.a[k][i];
  }
  fft.forward(f, 4);
  fft.forward(v);
  const double inv_n = 1.0 / static_cast<double>(n);
  const auto& ladder = fft.ladder();
  const double worst = ordered_max(n, [&](std::size_t i) {
    if (ladder.norm2(i) == 0.0) return 0.0;
    const Vec3 k = ladder.derivative_at(i);
    const Complex r = delta * f[4 * i] + Complex(0.0, 1.0) * (k[0] * f[4 * i + 1] +
                                                             k[1] * f[4 * i + 2] +
                                                             k[2] * f[4 * i + 3]);
    return std::abs(r) * inv_n;
  });
  const double vmax = ordered_max(n, [&](std::size_t i) { return std::abs(v[i]) * inv_n; });
  return worst / std::max(1.0, vmax);
}

double l2_norm(const SpinorField& psi) { return std::sqrt(total_charge(psi)); }

ErrorNorms error_norms(const SpinorField& a, const SpinorField& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("error_norms: grid mismatch");
  const std::size_t n = a.points();
  const double diff = ordered_sum(n, [&](std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(a.at(i, c) - b.at(i, c));
    return s;
  });
  const double ref = ordered_sum(n, [&](std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(b.at(i, c));
    return s;
  });
  const double linf = ordered_max(n, [&](std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(a.at(i, c) - b.at(i, c));
    return std::sqrt(s);
  });
  ErrorNorms e;
  e.linf_abs = linf;
  if (ref > 0.0) {
    e.l2_rel = std::sqrt(diff / ref);
  } else {
    e.l2_rel = diff > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  return e;
}

double projected_difference(const SpinorField& a_e, const SpinorField& a_p,
                            const SpinorField& b_e, const SpinorField& b_p) {
  const GridSpec& g = a_e.grid;
  if (!(a_p.grid == g) || !(b_e.grid == g) || !(b_p.grid == g)) {
    throw std::invalid_argument("projected_difference: grid mismatch");
  }
  return ordered_max(g.size(), [&](std::size_t i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) {
      s += std::norm(a_e.at(i, c) - b_e.at(i, c)) + std::norm(a_p.at(i, c) - b_p.at(i, c));
    }
    return s;
  });
}

RealField projector_density(const Fft& fft, const SpinorField& psi, Sign sign,
                            const ProjectorMode& mode) {
  const SpinorField p = apply_projector(fft, psi, sign, mode);
  RealField out(p.points());
  for (std::size_t i = 0; i < out.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(p.at(i, c));
    out[i] = s;
  }
  return out;
}

double integrate(const GridSpec& grid, const RealField& f) {
  return ordered_sum(f.size(), [&](std::size_t i) { return f[i]; }) * grid.cell_volume();
}

std::vector<double> convergence_orders(const std::vector<double>& errors) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < errors.size(); ++i) {
    out.push_back(std::log2(errors[i] / errors[i + 1]));
  }
  return out;
}

}  // namespace mdkit
