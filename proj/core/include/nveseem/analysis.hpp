#pragma once

#include <vector>

#include "nveseem/sequence.hpp"

namespace nveseem {

// Stretched-exponential envelope A*exp(-(t/T)^p) + C fitted to the trace
// versus total evolution time.
struct BaselineFit {
  double amplitude = 0.0;  // A
  double t2 = 1.0;         // T, us
  double stretch = 1.0;    // p
  double offset = 0.0;     // C
  double rms = 0.0;        // residual RMS over the fitted points
  bool converged = false;
  int iterations = 0;
  int n_skipped = 0;       // leading points excluded (pulse-transient guard)
};

double eval_baseline(const BaselineFit& fit, double t_us);

// Damped Gauss-Newton least squares; initialized from a log-linear
// regression at p=1; the earliest 2% of the time span is excluded.
// Converged when the relative parameter change drops below 1e-8 (200
// iteration cap; non-convergence is reported via the flag, best-so-far
// returned).  Throws NumericError for traces shorter than 10 points or
// constant traces.
BaselineFit fit_baseline(const EseemTrace& trace);

// Pointwise trace - model(time).
EseemTrace subtract_baseline(const EseemTrace& trace, const BaselineFit& fit);

enum class Window { None, Hann };

struct Spectrum {
  std::vector<double> freq_mhz;   // 0 .. Nyquist of the delay-axis sampling
  std::vector<double> amplitude;  // |DFT| * delta_tau
  double bin_width_mhz = 0.0;     // 1 / (pad * n * delta_tau)
  Window window = Window::Hann;
  int zero_pad = 4;
};

// Discrete Fourier magnitude of the residual against the interpulse delay
// axis (where the nuclear coherences actually precess), zero-padded by the
// given factor.  Requires a uniform delay grid.
Spectrum spectrum(const EseemTrace& residual, Window window = Window::Hann,
                  int zero_pad = 4);

struct Peak {
  double freq_mhz;
  double amplitude;
  double prominence;
};

// Local maxima with prominence at least min_prominence * max(amplitude),
// 3-point parabolic refinement, sorted by amplitude descending.
std::vector<Peak> find_peaks(const Spectrum& spec, double min_prominence = 0.05);

// Peak-to-peak residual over the first period of the dominant modulation
// frequency (after a 2%-of-span settling guard), divided by the baseline
// value at the middle of that window.
double modulation_depth(const EseemTrace& trace, const BaselineFit& fit);

}  // namespace nveseem
