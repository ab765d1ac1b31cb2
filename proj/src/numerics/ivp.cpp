#include "isoperiodic/errors.hpp"
#include "isoperiodic/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>

namespace isoperiodic
{

namespace
{

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
// Continuous extension (Hairer, Norsett & Wanner, DOPRI5 CONTD5).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

constexpr double safety = 0.9;
constexpr double beta = 0.04;
constexpr double expo1 = 0.2 - beta * 0.75;
constexpr double fac_min = 0.2; // step may grow at most 5x
constexpr double fac_max = 10.0; // and shrink at most 10x

State axpy(const State &y, double h, std::initializer_list<std::pair<double, const State *>> terms)
{
    State out = y;
    for (std::size_t i = 0; i < out.size(); ++i) {
        Complex acc{0.0, 0.0};
        for (const auto &[coef, k] : terms) {
            acc += coef * (*k)[i];
        }
        out[i] += h * acc;
    }
    return out;
}

} // namespace

void IVPSpec::validate() const
{
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw InvalidArgument("IVPSpec: tolerances must be positive");
    }
    if (!(initial_step > 0.0)) {
        throw InvalidArgument("IVPSpec: initial_step must be positive");
    }
    if (max_steps < 1) {
        throw InvalidArgument("IVPSpec: max_steps must be positive");
    }
}

Trajectory solve_ivp(const RhsFunction &rhs, double t0, const State &y0, double t1,
                     const IVPSpec &spec, std::span<const double> sample_points)
{
    spec.validate();
    if (y0.empty()) {
        throw InvalidArgument("solve_ivp: empty initial state");
    }
    const double dir = t1 >= t0 ? 1.0 : -1.0;
    for (double s : sample_points) {
        if ((s - t0) * dir < 0.0 || (s - t1) * dir > 0.0) {
            throw InvalidArgument("solve_ivp: sample point outside the integration interval");
        }
    }
    std::vector<double> samples(sample_points.begin(), sample_points.end());
    if (samples.empty()) {
        samples.push_back(t1);
    }
    std::sort(samples.begin(), samples.end(),
              [dir](double a, double b) { return dir > 0 ? a < b : a > b; });

    Trajectory out;
    const std::size_t n = y0.size();

    auto call = [&](double t, const State &y) {
        ++out.rhs_evaluations;
        try {
            State dy = rhs(t, y);
            if (dy.size() != n) {
                throw InvalidArgument("rhs returned a state of the wrong dimension");
            }
            for (const auto &v : dy) {
                if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
                    throw InvalidArgument("rhs returned a non-finite value");
                }
            }
            return dy;
        } catch (const std::exception &e) {
            std::throw_with_nested(RhsEvaluationError(
                "solve_ivp: rhs evaluation failed at t=" + std::to_string(t) + ": " + e.what(),
                t));
        }
    };

    std::size_t next_sample = 0;
    auto emit_exact = [&](double t, const State &y) {
        while (next_sample < samples.size() && samples[next_sample] == t) {
            out.t.push_back(t);
            out.y.push_back(y);
            ++next_sample;
        }
    };

    double t = t0;
    State y = y0;
    emit_exact(t, y);
    if (t0 == t1) {
        while (next_sample < samples.size()) {
            out.t.push_back(samples[next_sample++]);
            out.y.push_back(y);
        }
        return out;
    }

    State k1 = call(t, y);
    double h = dir * std::min(spec.initial_step, std::abs(t1 - t0));
    double err_old = 1e-4;
    bool last_rejected = false;

    while ((t1 - t) * dir > 0.0) {
        if (out.accepted_steps + out.rejected_steps >= spec.max_steps) {
            throw MaxStepsExceeded("solve_ivp: max_steps exceeded at t=" + std::to_string(t), t);
        }
        const double min_step = 10.0 * std::numeric_limits<double>::epsilon()
                                * std::max({std::abs(t), std::abs(t1), 1.0});
        if (std::abs(h) < min_step) {
            throw StepSizeUnderflow("solve_ivp: step size underflow at t=" + std::to_string(t), t);
        }
        if ((t + h - t1) * dir > 0.0) {
            h = t1 - t;
        }

        const State k2 = call(t + c2 * h, axpy(y, h, {{a21, &k1}}));
        const State k3 = call(t + c3 * h, axpy(y, h, {{a31, &k1}, {a32, &k2}}));
        const State k4 = call(t + c4 * h, axpy(y, h, {{a41, &k1}, {a42, &k2}, {a43, &k3}}));
        const State k5 =
            call(t + c5 * h, axpy(y, h, {{a51, &k1}, {a52, &k2}, {a53, &k3}, {a54, &k4}}));
        const State k6 = call(t + h, axpy(y, h,
                                          {{a61, &k1}, {a62, &k2}, {a63, &k3}, {a64, &k4},
                                           {a65, &k5}}));
        const State y_new = axpy(y, h,
                                 {{a71, &k1}, {a73, &k3}, {a74, &k4}, {a75, &k5}, {a76, &k6}});
        const State k7 = call(t + h, y_new);

        double err = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const Complex e = h
                              * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i]
                                 + e6 * k6[i] + e7 * k7[i]);
            const double sc = spec.abs_tol
                              + spec.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
            err += std::norm(e) / (sc * sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        const double fac11 = std::pow(err, expo1);
        if (err <= 1.0) {
            double fac = fac11 / std::pow(err_old, beta);
            fac = std::clamp(fac / safety, fac_min, fac_max);
            double h_new = h / fac;
            if (last_rejected && std::abs(h_new) > std::abs(h)) {
                h_new = h;
            }
            err_old = std::max(err, 1e-4);

            const double t_new = t + h;
            // Dense output for every sample inside (t, t_new].
            while (next_sample < samples.size()
                   && (samples[next_sample] - t_new) * dir <= 0.0) {
                const double s = samples[next_sample];
                State ys(n);
                if (s == t_new) {
                    ys = y_new;
                } else {
                    const double theta = (s - t) / h;
                    const double theta1 = 1.0 - theta;
                    for (std::size_t i = 0; i < n; ++i) {
                        const Complex ydiff = y_new[i] - y[i];
                        const Complex bspl = h * k1[i] - ydiff;
                        const Complex r4 = ydiff - h * k7[i] - bspl;
                        const Complex r5 = h
                                           * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i]
                                              + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
                        ys[i] = y[i]
                                + theta * (ydiff + theta1 * (bspl + theta * (r4 + theta1 * r5)));
                    }
                }
                out.t.push_back(s);
                out.y.push_back(std::move(ys));
                ++next_sample;
            }

            t = t_new;
            y = y_new;
            k1 = k7;
            h = h_new;
            ++out.accepted_steps;
            last_rejected = false;
        } else {
            h /= std::min(1.0 / fac_min, fac11 / safety);
            ++out.rejected_steps;
            last_rejected = true;
        }
    }
    return out;
}

} // namespace isoperiodic
