#include "rayfem/nmla.hpp"

#include "rayfem/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace rayfem {

std::vector<Vec2> DirectionEstimate::directions() const {
    std::vector<Vec2> out;
    out.reserve(angles.size());
    for (double a : angles) out.push_back(Vec2::fromAngle(a));
    return out;
}

int l_alpha(double alpha) {
    if (alpha <= 0.0) throw std::invalid_argument("l_alpha: alpha must be positive");
    const int a = static_cast<int>(std::floor(alpha));
    const int b = static_cast<int>(std::floor(alpha + std::cbrt(alpha) - 2.5));
    return std::max({1, a, b});
}

ImpedanceSamples sample_impedance(const WaveField& field, Vec2 x0, double r, int M, double omega,
                                  const WaveSpeedFn& c) {
    if (r <= 0.0 || M < 4) throw std::invalid_argument("sample_impedance: bad radius or count");
    const Rect& box = field.mesh().box();
    const double margin = 1e-12 * field.mesh().h();
    if (x0.x - r < box.xmin - margin || x0.x + r > box.xmax + margin ||
        x0.z - r < box.zmin - margin || x0.z + r > box.zmax + margin) {
        throw NmlaDomainError("sample_impedance: circle leaves the mesh");
    }
    const double c0 = c(x0.x, x0.z);
    ImpedanceSamples out;
    out.center = x0;
    out.radius = r;
    out.alpha = omega / c0 * r;
    out.values.resize(static_cast<size_t>(M));
    const cplx inv_ik = c0 / cplx(0.0, omega);  // 1/(i k(x0))
    for (int m = 0; m < M; ++m) {
        const double th = 2.0 * kPi * m / M;
        const Vec2 s = Vec2::fromAngle(th);
        const Vec2 x = x0 + s * r;
        const cplx u = field.eval(x.x, x.z);
        const GradC gu = field.grad(x.x, x.z);
        const cplx dur = gu.dx * s.x + gu.dz * s.z;
        out.values[static_cast<size_t>(m)] = inv_ik * dur + u;
    }
    return out;
}

FilteredSignal nmla_filter(const ImpedanceSamples& samples) {
    const int M = samples.M();
    const int L = l_alpha(samples.alpha);
    if (M < 2 * L + 2) throw std::invalid_argument("nmla_filter: too few samples for L_alpha");

    // J_l and J_l' for l = 0..L; negative orders via J_{-l} = (-1)^l J_l, which
    // makes the denominator i^l (J_l - i J_l') even in l.
    std::vector<double> J(static_cast<size_t>(L) + 1), Jp(static_cast<size_t>(L) + 1);
    bessel_j_array(L, samples.alpha, J.data(), Jp.data());
    std::vector<cplx> den(static_cast<size_t>(L) + 1);
    const cplx iunit(0.0, 1.0);
    cplx ipow(1.0, 0.0);
    for (int l = 0; l <= L; ++l) {
        den[static_cast<size_t>(l)] = ipow * cplx(J[static_cast<size_t>(l)], -Jp[static_cast<size_t>(l)]);
        if (std::abs(den[static_cast<size_t>(l)]) < 1e-14) {
            throw std::runtime_error("nmla_filter: vanishing filter denominator at order " +
                                     std::to_string(l));
        }
        ipow *= iunit;
    }

    // Discrete Fourier coefficients (FU)_l = (1/M) sum_m U_m e^{-il theta_m},
    // computed directly (M and L are small at desk scale).
    std::vector<cplx> FU(static_cast<size_t>(2 * L) + 1);
    for (int l = -L; l <= L; ++l) {
        cplx acc(0.0, 0.0);
        for (int m = 0; m < M; ++m) {
            const double ang = -2.0 * kPi * l * m / M;
            acc += samples.values[static_cast<size_t>(m)] * cplx(std::cos(ang), std::sin(ang));
        }
        FU[static_cast<size_t>(l + L)] = acc / static_cast<double>(M);
    }

    FilteredSignal out;
    out.L = L;
    out.values.assign(static_cast<size_t>(M), cplx(0.0, 0.0));
    for (int m = 0; m < M; ++m) {
        cplx acc(0.0, 0.0);
        for (int l = -L; l <= L; ++l) {
            const double ang = 2.0 * kPi * l * m / M;
            const cplx mode = FU[static_cast<size_t>(l + L)] / den[static_cast<size_t>(std::abs(l))];
            acc += mode * cplx(std::cos(ang), std::sin(ang));
        }
        out.values[static_cast<size_t>(m)] = acc / static_cast<double>(2 * L + 1);
    }
    return out;
}

DirectionEstimate sharp_peak_locations(const FilteredSignal& signal, const PeakConfig& peaks) {
    if (peaks.threshold <= 0.0 || peaks.threshold >= 1.0) {
        throw std::invalid_argument("sharp_peak_locations: threshold must be in (0,1)");
    }
    const int M = signal.M();
    DirectionEstimate est;
    est.resolutionWidth = signal.resolutionWidth();

    std::vector<double> mag(static_cast<size_t>(M));
    double maxMag = 0.0;
    for (int m = 0; m < M; ++m) {
        mag[static_cast<size_t>(m)] = std::abs(signal.values[static_cast<size_t>(m)]);
        maxMag = std::max(maxMag, mag[static_cast<size_t>(m)]);
    }
    if (maxMag < peaks.abs_floor) return est;

    struct Cand {
        double angle;
        double value;
        cplx amp;
    };
    std::vector<Cand> cands;
    const double cut = peaks.threshold * maxMag;
    for (int m = 0; m < M; ++m) {
        const double y0 = mag[static_cast<size_t>((m + M - 1) % M)];
        const double y1 = mag[static_cast<size_t>(m)];
        const double y2 = mag[static_cast<size_t>((m + 1) % M)];
        if (y1 < cut || y1 < y0 || y1 <= y2) continue;
        const double denom = y0 - 2.0 * y1 + y2;
        const double delta = std::abs(denom) > 1e-300 ? 0.5 * (y0 - y2) / denom : 0.0;
        const double th = std::fmod((m + delta) * 2.0 * kPi / M + 2.0 * kPi, 2.0 * kPi);
        cands.push_back({th, y1 - 0.25 * (y0 - y2) * delta, signal.values[static_cast<size_t>(m)]});
    }
    std::sort(cands.begin(), cands.end(), [](const Cand& a, const Cand& b) {
        return a.value > b.value;
    });

    std::vector<Cand> kept;
    const double mergeR = est.resolutionWidth;
    const double lobeR = 1.6 * est.resolutionWidth;  // first side lobe sits at 1.5x
    for (const Cand& c : cands) {
        bool drop = false;
        for (const Cand& k : kept) {
            const double d = std::abs(wrapAngle(c.angle - k.angle));
            if (d <= mergeR || (d <= lobeR && c.value < k.value / 3.0)) {
                drop = true;
                break;
            }
        }
        if (!drop) kept.push_back(c);
    }
    std::sort(kept.begin(), kept.end(), [](const Cand& a, const Cand& b) {
        return a.angle < b.angle;
    });
    for (const Cand& c : kept) {
        est.angles.push_back(c.angle);
        est.amplitudes.push_back(c.amp);
        est.peakValues.push_back(c.value);
    }
    return est;
}

DirectionEstimate nmla(Vec2 x0, const WaveField& field, double omega, const WaveSpeedFn& c,
                       const NmlaConfig& cfg) {
    const Rect& box = field.mesh().box();
    const double h = field.mesh().h();
    const double c0 = c(x0.x, x0.z);
    const double lambda = 2.0 * kPi * c0 / omega;

    double r = std::max(cfg.radius_wavelengths * lambda,
                        cfg.radius_scale / std::sqrt(omega));
    const double cap = std::min(std::min(x0.x - box.xmin, box.xmax - x0.x),
                                std::min(x0.z - box.zmin, box.zmax - x0.z)) -
                       cfg.cap_margin_cells * h;
    r = std::min(r, cap);
    if (!(r > 0.0)) throw NmlaDomainError("nmla: no room for a sampling circle");
    const double alpha = omega / c0 * r;
    if (alpha < cfg.min_alpha) throw NmlaDomainError("nmla: sampling circle too small");

    const int L = l_alpha(alpha);
    const int M = std::max(2 * L + 2,
                           static_cast<int>(cfg.oversampling * std::ceil(alpha)));
    const ImpedanceSamples samples = sample_impedance(field, x0, r, M, omega, c);
    return sharp_peak_locations(nmla_filter(samples), cfg.peaks);
}

}  // namespace rayfem
