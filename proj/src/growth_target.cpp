#include "qfent/growth_target.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "qfent/errors.hpp"
#include "qfent/interval_set.hpp"

namespace qfent {
namespace {

constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

std::vector<double> geometric_grid(double lo, double hi, int n) {
  std::vector<double> xs(n);
  const double r = std::log(hi / lo);
  for (int j = 0; j < n; ++j) xs[j] = lo * std::exp(r * j / (n - 1));
  xs.back() = hi;
  return xs;
}

// Piecewise interpolation of tabulated (x, y) with constant-slope extrapolation.
// Log-log when every sample is positive, linear otherwise.
class Table {
 public:
  Table(std::vector<double> x, std::vector<double> y) : x_(std::move(x)), y_(std::move(y)) {
    loglog_ = std::all_of(x_.begin(), x_.end(), [](double v) { return v > 0; }) &&
              std::all_of(y_.begin(), y_.end(), [](double v) { return v > 0; });
    if (loglog_) {
      for (auto& v : x_) v = std::log(v);
      for (auto& v : y_) v = std::log(v);
    }
  }
  double operator()(double x) const {
    if (x_.size() == 1) return loglog_ ? std::exp(y_[0]) : y_[0];
    double t = x;
    if (loglog_) {
      if (x <= 0) return 0.0;
      t = std::log(x);
    }
    auto it = std::upper_bound(x_.begin(), x_.end(), t);
    std::size_t j = static_cast<std::size_t>(it - x_.begin());
    j = std::clamp<std::size_t>(j, 1, x_.size() - 1);
    const double s = (y_[j] - y_[j - 1]) / (x_[j] - x_[j - 1]);
    const double y = y_[j - 1] + s * (t - x_[j - 1]);
    return loglog_ ? std::exp(y) : y;
  }

 private:
  std::vector<double> x_, y_;
  bool loglog_ = false;
};

std::map<std::string, double> parse_params(const std::string& body, const std::string& spec) {
  std::map<std::string, double> out;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw ParseError("target spec '" + spec + "': expected key=value");
    const std::string key = item.substr(0, eq);
    if (out.count(key)) throw ParseError("target spec '" + spec + "': duplicate key " + key);
    out[key] = parse_double(item.substr(eq + 1));
  }
  return out;
}

double take(std::map<std::string, double>& p, const std::string& key, const std::string& spec) {
  auto it = p.find(key);
  if (it == p.end()) throw ParseError("target spec '" + spec + "': missing " + key);
  const double v = it->second;
  p.erase(it);
  return v;
}

}  // namespace

MonotoneEnvelope::MonotoneEnvelope(const std::function<double(double)>& h, int grid, double x_min,
                                   double x_max)
    : xs_(geometric_grid(x_min, x_max, grid)), runmax_(grid), cum_(grid) {
  double m = 0.0;
  for (int j = 0; j < grid; ++j) {
    m = std::max(m, h(xs_[j]));
    runmax_[j] = m;
  }
  cum_[0] = 0.5 * runmax_[0] * xs_[0];
  for (int j = 1; j < grid; ++j)
    cum_[j] = cum_[j - 1] + 0.5 * (xs_[j] - xs_[j - 1]) * (runmax_[j] + runmax_[j - 1]);
}

double MonotoneEnvelope::operator()(double x) const {
  if (x <= 0) return 0.0;
  double m;
  if (x <= xs_.front()) {
    m = runmax_.front() * x / xs_.front();
  } else if (x >= xs_.back()) {
    m = runmax_.back();
  } else {
    const auto j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    m = runmax_[j - 1] + t * (runmax_[j] - runmax_[j - 1]);
  }
  return m + x;
}

double MonotoneEnvelope::integral_to(double x) const {
  double im;
  if (x <= xs_.front()) {
    im = 0.5 * runmax_.front() * x * x / xs_.front();
  } else if (x >= xs_.back()) {
    im = cum_.back() + runmax_.back() * (x - xs_.back());
  } else {
    const auto j = static_cast<std::size_t>(std::upper_bound(xs_.begin(), xs_.end(), x) - xs_.begin());
    const double t = (x - xs_[j - 1]) / (xs_[j] - xs_[j - 1]);
    const double mx = runmax_[j - 1] + t * (runmax_[j] - runmax_[j - 1]);
    im = cum_[j - 1] + 0.5 * (x - xs_[j - 1]) * (runmax_[j - 1] + mx);
  }
  return im + 0.5 * x * x;
}

double MonotoneEnvelope::g(double x) const {
  if (x <= 0) return 0.0;
  return integral_to(x) / x;
}

GrowthTarget::GrowthTarget(TargetFamily family, std::string spec, Fn f, Fn g, Fn h)
    : family_(family), spec_(std::move(spec)), f_(std::move(f)), g_(std::move(g)), h_(std::move(h)) {}

double GrowthTarget::certified(double n) const { return 2.0 * n / kPi2 * g_(0.5 / n); }

void GrowthTarget::apply_envelope_if_needed() {
  const auto xs = geometric_grid(0x1p-40, 0.5, 4096);
  bool monotone = true;
  double prev = h_(xs[0]);
  for (std::size_t j = 1; j < xs.size() && monotone; ++j) {
    const double cur = h_(xs[j]);
    monotone = cur >= prev;
    prev = cur;
  }
  if (monotone) return;
  auto env = std::make_shared<const MonotoneEnvelope>(h_);
  h_ = [env](double x) { return (*env)(x); };
  g_ = [env](double x) { return env->g(x); };
  envelope_applied_ = true;
}

GrowthTarget make_power_target(double c, double alpha) {
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("power target: need c > 0");
  if (!(alpha > 0 && alpha < 1)) throw DomainError("power target: need 0 < alpha < 1");
  const double a = 0.5 * kPi2 * c;
  auto g = [a, alpha](double x) { return x <= 0 ? 0.0 : a * std::pow(2.0 * x, 1.0 - alpha); };
  auto h = [a, alpha](double x) {
    return x <= 0 ? 0.0 : (2.0 - alpha) * a * std::pow(2.0 * x, 1.0 - alpha);
  };
  auto f = [c, alpha](double n) { return c * std::pow(n, alpha); };
  return GrowthTarget(TargetFamily::kPower,
                      "power:c=" + format_double(c) + ",alpha=" + format_double(alpha), f, g, h);
}

GrowthTarget make_near_linear_target(double c) {
  if (!(c > 0) || !std::isfinite(c)) throw DomainError("nearlinear target: need c > 0");
  const double a = 0.5 * kPi2 * c;
  constexpr double e = std::numbers::e;
  auto g = [a](double x) {
    if (x <= 0) return 0.0;
    return a / std::log(0.5 / x + e);
  };
  auto h = [a](double x) {
    if (x <= 0) return 0.0;
    const double u = 0.5 / x;
    const double l = std::log(u + e);
    return a / l + a * (u / (u + e)) / (l * l);
  };
  auto f = [c](double n) { return c * n / std::log(n + e); };
  GrowthTarget t(TargetFamily::kNearLinear, "nearlinear:c=" + format_double(c), f, g, h);
  t.apply_envelope_if_needed();
  return t;
}

GrowthTarget make_custom_target(std::vector<std::pair<double, double>> f_samples, GrowthTarget::Fn g,
                                GrowthTarget::Fn h, std::string spec) {
  GrowthTarget::Fn f;
  if (f_samples.empty()) {
    f = [g](double n) { return 2.0 * n / kPi2 * g(0.5 / n); };
  } else {
    std::sort(f_samples.begin(), f_samples.end());
    std::vector<double> ns, fs;
    for (auto [n, v] : f_samples) {
      if (!(n >= 1)) throw DomainError("custom target: f sample at N < 1");
      ns.push_back(n);
      fs.push_back(v);
    }
    auto table = std::make_shared<const Table>(ns, fs);
    f = [table](double n) { return (*table)(n); };
  }
  GrowthTarget t(TargetFamily::kCustom, std::move(spec), std::move(f), std::move(g), std::move(h));
  t.apply_envelope_if_needed();
  return t;
}

GrowthTarget read_custom_target(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open target table " + path.string());
  std::vector<std::pair<double, double>> fs;
  std::vector<double> xs, gs, hs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto p = line.find('#'); p != std::string::npos) line.erase(p);
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, ',')) cols.push_back(col);
    if (cols.empty() || (cols.size() == 1 && cols[0].find_first_not_of(" \t\r") == std::string::npos))
      continue;
    const std::string where = path.string() + ":" + std::to_string(lineno);
    if (cols.size() != 3) throw ParseError(where + ": expected three columns");
    if (cols[0].find_first_not_of(" \t") != std::string::npos &&
        cols[0].substr(cols[0].find_first_not_of(" \t"), 1) == "f") {
      fs.emplace_back(parse_double(cols[1]), parse_double(cols[2]));
      continue;
    }
    const double x = parse_double(cols[0]);
    if (x <= 0) continue;  // g(0) = h(0) = 0 is implied
    if (!xs.empty() && x <= xs.back()) throw ParseError(where + ": x must increase");
    xs.push_back(x);
    gs.push_back(parse_double(cols[1]));
    hs.push_back(parse_double(cols[2]));
  }
  if (xs.size() < 2) throw ParseError(path.string() + ": need at least two table rows");
  auto gt = std::make_shared<const Table>(xs, gs);
  auto ht = std::make_shared<const Table>(xs, hs);
  return make_custom_target(
      std::move(fs), [gt](double x) { return x <= 0 ? 0.0 : (*gt)(x); },
      [ht](double x) { return x <= 0 ? 0.0 : (*ht)(x); }, "custom:" + path.string());
}

GrowthTarget parse_target_spec(const std::string& spec) {
  const auto colon = spec.find(':');
  if (colon == std::string::npos) throw ParseError("target spec '" + spec + "': missing family");
  const std::string family = spec.substr(0, colon);
  const std::string body = spec.substr(colon + 1);
  if (family == "custom") {
    if (body.empty()) throw ParseError("target spec '" + spec + "': missing path");
    return read_custom_target(body);
  }
  auto params = parse_params(body, spec);
  if (family == "power") {
    const double c = take(params, "c", spec);
    const double alpha = take(params, "alpha", spec);
    if (!params.empty()) throw ParseError("target spec '" + spec + "': unknown key " + params.begin()->first);
    return make_power_target(c, alpha);
  }
  if (family == "nearlinear") {
    const double c = take(params, "c", spec);
    if (!params.empty()) throw ParseError("target spec '" + spec + "': unknown key " + params.begin()->first);
    return make_near_linear_target(c);
  }
  throw ParseError("target spec '" + spec + "': unknown family " + family);
}

TargetCheck validate_target(const GrowthTarget& t) {
  auto fail = [](std::string why) { return TargetCheck{false, std::move(why)}; };
  if (t.g(0.0) != 0.0) return fail("g(0) != 0");

  const auto grid = geometric_grid(0x1p-40, 0.5, 512);
  for (std::size_t j = 1; j < grid.size(); ++j) {
    if (!(t.g(grid[j]) >= t.g(grid[j - 1])))
      return fail("g not monotone near x=" + format_double(grid[j]));
    if (!(t.h(grid[j]) >= t.h(grid[j - 1])))
      return fail("h not monotone near x=" + format_double(grid[j]));
  }

  // The envelope pair satisfies the relation by construction but has kinks
  // that a central difference would straddle.
  if (!t.envelope_applied()) {
    for (double x : geometric_grid(1e-6, 0.4, 64)) {
      const double eta = 1e-4 * x;
      const double d = ((x + eta) * t.g(x + eta) - (x - eta) * t.g(x - eta)) / (2.0 * eta);
      const double hx = t.h(x);
      if (!(std::fabs(d - hx) <= 1e-5 * std::max(std::fabs(hx), std::fabs(d))))
        return fail("h != (x g)' at x=" + format_double(x) + ": h=" + format_double(hx) +
                    " (x g)'=" + format_double(d));
    }
  }

  // Sublinearity first, so a linear f is reported as such rather than as a
  // g-condition failure.
  double first = 0, prev = 0;
  for (int e = 0; e <= 20; ++e) {
    const double n = std::ldexp(1.0, e);
    const double fn = t.f(n);
    if (!(fn > 0)) return fail("f_N <= 0 at N=" + format_double(n));
    const double r = fn / n;
    if (e == 0) first = r;
    if (e > 0 && r > prev * (1 + 1e-12))
      return fail("f_N/N increases at N=" + format_double(n));
    prev = r;
  }
  if (!(prev < first * (1 - 1e-9))) return fail("f_N/N does not decrease towards 0");

  for (int e = 0; e <= 20; ++e) {
    const double n = std::ldexp(1.0, e);
    const double fn = t.f(n);
    const double cert = t.certified(n);
    if (!(cert >= fn * (1 - 1e-12)))
      return fail("g condition fails at N=" + format_double(n) + ": (2N/pi^2) g(1/(2N))=" +
                  format_double(cert) + " < f_N=" + format_double(fn));
  }
  return {};
}

}  // namespace qfent
