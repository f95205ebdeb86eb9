#include "nveseem/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/FFT>

#include "nveseem/errors.hpp"

namespace nveseem {

double eval_baseline(const BaselineFit& fit, double t_us) {
  const double u = t_us / fit.t2;
  const double up = u > 0.0 ? std::pow(u, fit.stretch) : 0.0;
  return fit.amplitude * std::exp(-up) + fit.offset;
}

namespace {

struct FitPoint {
  double t, y;
};

double fit_cost(const std::vector<FitPoint>& pts, const Eigen::Vector4d& x) {
  BaselineFit f;
  f.amplitude = x(0);
  f.t2 = x(1);
  f.stretch = x(2);
  f.offset = x(3);
  double c = 0.0;
  for (const auto& p : pts) {
    const double r = eval_baseline(f, p.t) - p.y;
    c += r * r;
  }
  return c;
}

Eigen::Vector4d clamp_params(Eigen::Vector4d x) {
  x(1) = std::max(x(1), 1e-6);
  x(2) = std::min(std::max(x(2), 0.5), 3.0);
  return x;
}

}  // namespace

BaselineFit fit_baseline(const EseemTrace& trace) {
  const std::size_t n = trace.size();
  if (n < 10) throw NumericError("baseline fit needs at least 10 points");
  const double ymin =
      *std::min_element(trace.signal.begin(), trace.signal.end());
  const double ymax =
      *std::max_element(trace.signal.begin(), trace.signal.end());
  if (ymax - ymin <= 0.0)
    throw NumericError("constant trace; baseline fit is degenerate");

  // Leading 2% of the time span carries pulse transients; skip it.
  const double t0 = trace.time_us.front();
  const double cutoff = t0 + 0.02 * (trace.time_us.back() - t0);
  std::vector<FitPoint> pts;
  pts.reserve(n);
  for (std::size_t i = 0; i < n; ++i)
    if (trace.time_us[i] >= cutoff)
      pts.push_back({trace.time_us[i], trace.signal[i]});
  const int n_skipped = static_cast<int>(n - pts.size());
  if (pts.size() < 4)
    throw NumericError("too few points after transient exclusion");

  // Starting point: offset just below the data, then a log-linear
  // regression for the amplitude and time constant at stretch 1.
  const double c0 = ymin - 1e-3 * (ymax - ymin);
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& p : pts) {
    const double ly = std::log(p.y - c0);
    sx += p.t;
    sy += ly;
    sxx += p.t * p.t;
    sxy += p.t * ly;
  }
  const double m = static_cast<double>(pts.size());
  const double denom = m * sxx - sx * sx;
  double slope = 0.0, icept = std::log(ymax - c0);
  if (denom > 0.0) {
    slope = (m * sxy - sx * sy) / denom;
    icept = (sy - slope * sx) / m;
  }
  const double span = pts.back().t - pts.front().t;
  Eigen::Vector4d x(std::exp(icept), slope < 0.0 ? -1.0 / slope : span, 1.0,
                    c0);
  x = clamp_params(x);

  // Damped least squares on (A, T, p, C).
  double lambda = 1e-3;
  double cost = fit_cost(pts, x);
  bool converged = false;
  int iter = 0;
  for (; iter < 200; ++iter) {
    Eigen::Matrix4d jtj = Eigen::Matrix4d::Zero();
    Eigen::Vector4d jtr = Eigen::Vector4d::Zero();
    const double A = x(0), T = x(1), P = x(2), C = x(3);
    for (const auto& p : pts) {
      const double u = p.t / T;
      const double up = u > 0.0 ? std::pow(u, P) : 0.0;
      const double e = std::exp(-up);
      const double r = A * e + C - p.y;
      Eigen::Vector4d j;
      j(0) = e;
      j(1) = A * e * P * up / T;
      j(2) = u > 0.0 ? -A * e * up * std::log(u) : 0.0;
      j(3) = 1.0;
      jtj.noalias() += j * j.transpose();
      jtr.noalias() += j * r;
    }
    Eigen::Matrix4d damped = jtj;
    damped.diagonal() *= 1.0 + lambda;
    const Eigen::Vector4d delta = damped.ldlt().solve(-jtr);
    const Eigen::Vector4d xc = clamp_params(x + delta);
    const double cost_c = fit_cost(pts, xc);
    if (cost_c < cost) {
      const Eigen::Vector4d applied = xc - x;
      double rel = 0.0;
      for (int k = 0; k < 4; ++k)
        rel = std::max(rel, std::abs(applied(k)) / (std::abs(x(k)) + 1e-12));
      x = xc;
      cost = cost_c;
      lambda /= 3.0;
      if (rel < 1e-8) {
        converged = true;
        ++iter;
        break;
      }
    } else {
      lambda *= 10.0;
      if (lambda > 1e12) break;
    }
  }

  BaselineFit fit;
  fit.amplitude = x(0);
  fit.t2 = x(1);
  fit.stretch = x(2);
  fit.offset = x(3);
  fit.rms = std::sqrt(cost / static_cast<double>(pts.size()));
  fit.converged = converged;
  fit.iterations = iter;
  fit.n_skipped = n_skipped;
  return fit;
}

EseemTrace subtract_baseline(const EseemTrace& trace, const BaselineFit& fit) {
  EseemTrace out = trace;
  for (std::size_t i = 0; i < out.size(); ++i)
    out.signal[i] -= eval_baseline(fit, out.time_us[i]);
  return out;
}

Spectrum spectrum(const EseemTrace& residual, Window window, int zero_pad) {
  const std::size_t m = residual.size();
  if (m < 2) throw NumericError("spectrum needs at least two points");
  if (zero_pad < 1) throw ConfigError("zero-pad factor must be >= 1");

  const double d0 = residual.delay_us[1] - residual.delay_us[0];
  if (!(d0 > 0.0)) throw NumericError("delay axis is not increasing");
  for (std::size_t i = 1; i + 1 < m; ++i) {
    const double di = residual.delay_us[i + 1] - residual.delay_us[i];
    if (std::abs(di - d0) > 1e-6 * d0)
      throw NumericError("delay axis is not uniform");
  }

  const std::size_t nfft = m * static_cast<std::size_t>(zero_pad);
  std::vector<complexd> x(nfft, complexd(0.0, 0.0));
  for (std::size_t i = 0; i < m; ++i) {
    double w = 1.0;
    if (window == Window::Hann)
      w = 0.5 - 0.5 * std::cos(two_pi * static_cast<double>(i) /
                               static_cast<double>(m - 1));
    x[i] = residual.signal[i] * w;
  }

  Eigen::FFT<double> fft;
  std::vector<complexd> X;
  fft.fwd(X, x);

  Spectrum spec;
  spec.window = window;
  spec.zero_pad = zero_pad;
  spec.bin_width_mhz = 1.0 / (static_cast<double>(nfft) * d0);
  const std::size_t n_out = nfft / 2 + 1;
  spec.freq_mhz.resize(n_out);
  spec.amplitude.resize(n_out);
  for (std::size_t k = 0; k < n_out; ++k) {
    spec.freq_mhz[k] = static_cast<double>(k) * spec.bin_width_mhz;
    spec.amplitude[k] = std::abs(X[k]) * d0;
  }
  return spec;
}

std::vector<Peak> find_peaks(const Spectrum& spec, double min_prominence) {
  const std::size_t n = spec.amplitude.size();
  if (n == 0) throw NumericError("empty spectrum");
  const auto& a = spec.amplitude;
  const double gmax = *std::max_element(a.begin(), a.end());
  std::vector<Peak> peaks;
  if (gmax <= 0.0) return peaks;

  for (std::size_t i = 1; i + 1 < n; ++i) {
    if (!(a[i] > a[i - 1] && a[i] >= a[i + 1])) continue;
    // Prominence: drop to the highest saddle separating this maximum from
    // higher ground on either side.
    double left_min = a[i];
    for (std::size_t j = i; j-- > 0;) {
      if (a[j] > a[i]) break;
      left_min = std::min(left_min, a[j]);
    }
    double right_min = a[i];
    for (std::size_t j = i + 1; j < n; ++j) {
      if (a[j] > a[i]) break;
      right_min = std::min(right_min, a[j]);
    }
    const double prom = a[i] - std::max(left_min, right_min);
    if (prom < min_prominence * gmax) continue;

    double freq = spec.freq_mhz[i];
    double amp = a[i];
    const double pm = a[i - 1], pc = a[i], pp = a[i + 1];
    const double denom = pm - 2.0 * pc + pp;
    if (denom < 0.0) {
      const double s = 0.5 * (pm - pp) / denom;
      freq += s * spec.bin_width_mhz;
      amp = pc - 0.25 * (pm - pp) * s;
    }
    peaks.push_back({freq, amp, prom});
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const Peak& l, const Peak& r) { return l.amplitude > r.amplitude; });
  return peaks;
}

double modulation_depth(const EseemTrace& trace, const BaselineFit& fit) {
  const EseemTrace residual = subtract_baseline(trace, fit);
  const std::size_t n = residual.size();
  if (n < 4) throw NumericError("modulation depth needs at least 4 points");

  // Skip the same leading transient as the fit, on the delay axis.
  const double d0 = residual.delay_us.front();
  const double cutoff = d0 + 0.02 * (residual.delay_us.back() - d0);
  std::size_t i0 = 0;
  while (i0 + 1 < n && residual.delay_us[i0] < cutoff) ++i0;

  // One period of the dominant modulation frequency, measured with the
  // standard instrument settings.
  const Spectrum spec = spectrum(residual, Window::Hann, 4);
  const std::vector<Peak> peaks = find_peaks(spec, 0.05);
  double window_end = residual.delay_us.back();
  if (!peaks.empty() && peaks.front().freq_mhz > 0.0)
    window_end = residual.delay_us[i0] + 1.0 / peaks.front().freq_mhz;

  std::size_t i1 = i0;
  while (i1 + 1 < n && residual.delay_us[i1 + 1] <= window_end) ++i1;
  while (i1 - i0 + 1 < 3 && i1 + 1 < n) ++i1;  // widen degenerate windows

  double lo = residual.signal[i0], hi = residual.signal[i0];
  for (std::size_t i = i0; i <= i1; ++i) {
    lo = std::min(lo, residual.signal[i]);
    hi = std::max(hi, residual.signal[i]);
  }
  const std::size_t mid = (i0 + i1) / 2;
  const double base = eval_baseline(fit, trace.time_us[mid]);
  if (base == 0.0) throw NumericError("zero baseline at depth window");
  return (hi - lo) / base;
}

}  // namespace nveseem
