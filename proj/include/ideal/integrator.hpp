// Dormand-Prince 8(5,3) adaptive integrator, a fixed-step RK4 reference, and
// landing on a physical epoch while stepping in a regularized variable.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>

#include "ideal/core.hpp"

namespace ideal {

template <typename Scalar>
struct Tolerances {
    Scalar rtol{1e-12};
    Scalar atol{1e-12};
    Scalar h0{1e-2};
    Scalar h_max{std::numeric_limits<Scalar>::infinity()};
    long max_steps{20'000'000};
    // Epoch landing tolerance on t; 0 selects 32 ulp of max(1, |T|).
    Scalar tol_t{0};
    // Index of an accumulating clock component (physical time, or an angle
    // that grows by 2 pi per revolution), or -1. Its error is weighted as if
    // its magnitude were one unit, so accuracy does not depend on the origin
    // of the clock or on how many revolutions have elapsed.
    int clock_component{-1};
};

struct StepStats {
    long accepted{0};
    long rejected{0};
    long evaluations{0};

    StepStats& operator+=(const StepStats& o) {
        accepted += o.accepted;
        rejected += o.rejected;
        evaluations += o.evaluations;
        return *this;
    }
    friend StepStats operator-(StepStats a, const StepStats& b) {
        a.accepted -= b.accepted;
        a.rejected -= b.rejected;
        a.evaluations -= b.evaluations;
        return a;
    }
};

namespace detail {

// Hairer's DOP853 coefficients.
inline constexpr long double kDopC[12] = {
    0.0L,
    0.526001519587677318785587544488e-01L,
    0.789002279381515978178381316732e-01L,
    0.118350341907227396726757197510L,
    0.281649658092772603273242802490L,
    0.333333333333333333333333333333L,
    0.25L,
    0.307692307692307692307692307692L,
    0.651282051282051282051282051282L,
    0.6L,
    0.857142857142857142857142857142L,
    1.0L};

inline constexpr long double kDopA[12][12] = {
    {},
    {5.26001519587677318785587544488e-2L},
    {1.97250569845378994544595329183e-2L, 5.91751709536136983633785987549e-2L},
    {2.95875854768068491816892993775e-2L, 0, 8.87627564304205475450678981324e-2L},
    {2.41365134159266685502369798665e-1L, 0, -8.84549479328286085344864962717e-1L,
     9.24834003261792003115737966543e-1L},
    {3.7037037037037037037037037037e-2L, 0, 0, 1.70828608729473871279604482173e-1L,
     1.25467687566822425016691814123e-1L},
    {3.7109375e-2L, 0, 0, 1.70252211019544039314978060272e-1L, 6.02165389804559606850219397283e-2L,
     -1.7578125e-2L},
    {3.70920001185047927108779319836e-2L, 0, 0, 1.70383925712239993810214054705e-1L,
     1.07262030446373284651809199168e-1L, -1.53194377486244017527936158236e-2L,
     8.27378916381402288758473766002e-3L},
    {6.24110958716075717114429577812e-1L, 0, 0, -3.36089262944694129406857109825L,
     -8.68219346841726006818189891453e-1L, 2.75920996994467083049415600797e1L,
     2.01540675504778934086186788979e1L, -4.34898841810699588477366255144e1L},
    {4.77662536438264365890433908527e-1L, 0, 0, -2.48811461997166764192642586468L,
     -5.90290826836842996371446475743e-1L, 2.12300514481811942347288949897e1L,
     1.52792336328824235832596922938e1L, -3.32882109689848629194453265587e1L,
     -2.03312017085086261358222928593e-2L},
    {-9.3714243008598732571704021658e-1L, 0, 0, 5.18637242884406370830023853209L,
     1.09143734899672957818500254654L, -8.14978701074692612513997267357L,
     -1.85200656599969598641566180701e1L, 2.27394870993505042818970056734e1L,
     2.49360555267965238987089396762L, -3.0467644718982195003823669022L},
    {2.27331014751653820792359768449L, 0, 0, -1.05344954667372501984066689879e1L,
     -2.00087205822486249909675718444L, -1.79589318631187989172765950534e1L,
     2.79488845294199600508499808837e1L, -2.85899827713502369474065508674L,
     -8.87285693353062954433549289258L, 1.23605671757943030647266201528e1L,
     6.43392746015763530355970484046e-1L}};

inline constexpr long double kDopB[12] = {
    5.42937341165687622380535766363e-2L, 0, 0, 0, 0, 4.45031289275240888144113950566L,
    1.89151789931450038304281599044L, -5.8012039600105847814672114227L,
    3.1116436695781989440891606237e-1L, -1.52160949662516078556178806805e-1L,
    2.01365400804030348374776537501e-1L, 4.47106157277725905176885569043e-2L};

inline constexpr long double kDopE5[12] = {
    0.1312004499419488073250102996e-1L, 0, 0, 0, 0, -0.1225156446376204440720569753e+1L,
    -0.4957589496572501915214079952L, 0.1664377182454986536961530415e+1L,
    -0.3503288487499736816886487290L, 0.3341791187130174790297318841L,
    0.8192320648511571246570742613e-1L, -0.2235530786388629525884427845e-1L};

// Third-order embedded weights minus b.
inline constexpr long double kDopBhh[12] = {
    0.244094488188976377952755905512L, 0, 0, 0, 0, 0, 0, 0, 0.733846688281611857341361741547L, 0, 0,
    0.220588235294117647058823529412e-1L};

template <typename Scalar>
struct Dop853Tableau {
    std::array<Scalar, 12> c{};
    std::array<std::array<Scalar, 12>, 12> a{};
    std::array<Scalar, 12> b{}, e5{}, e3{};

    Dop853Tableau() {
        for (int i = 0; i < 12; ++i) {
            c[i] = static_cast<Scalar>(kDopC[i]);
            b[i] = static_cast<Scalar>(kDopB[i]);
            e5[i] = static_cast<Scalar>(kDopE5[i]);
            e3[i] = static_cast<Scalar>(kDopB[i] - kDopBhh[i]);
            for (int j = 0; j < 12; ++j) a[i][j] = static_cast<Scalar>(kDopA[i][j]);
        }
    }
};

template <typename Scalar>
inline const Dop853Tableau<Scalar> dop853_tableau{};

}  // namespace detail

/// Adaptive DOP853 stepper over a fixed-size state. Field is callable as
/// `State(Scalar s, const State& y)` and may throw SingularStateError, which
/// rejects the trial step.
template <typename Scalar, int N, typename Field>
class Dop853 {
public:
    using State = Eigen::Matrix<Scalar, N, 1>;

    Dop853(Field f, const Tolerances<Scalar>& tol, Scalar s0, const State& y0)
        : f_(std::move(f)), tol_(tol), s_(s0), h_(tol.h0), y_(y0) {
        if (!(tol.rtol > 0) || !(tol.atol > 0) || tol.max_steps <= 0)
            throw std::invalid_argument("Dop853: tolerances must be positive");
        if (!(h_ > 0)) throw std::invalid_argument("Dop853: initial step must be positive");
        if (tol.clock_component >= N) throw std::invalid_argument("Dop853: clock component out of range");
        k_[0] = eval(s_, y_);
    }

    Scalar s() const { return s_; }
    const State& y() const { return y_; }
    const State& dy() const { return k_[0]; }
    Scalar step_size() const { return h_; }
    void set_step_size(Scalar h) { h_ = h; }
    const StepStats& stats() const { return stats_; }
    void charge(const StepStats& extra) { stats_ += extra; }

    struct Checkpoint {
        Scalar s, h;
        State y, k0;
        StepStats stats;
        Scalar facold;
        bool last_rejected;
    };
    Checkpoint checkpoint() const { return {s_, h_, y_, k_[0], stats_, facold_, last_rejected_}; }
    void restore(const Checkpoint& c) {
        s_ = c.s;
        h_ = c.h;
        y_ = c.y;
        k_[0] = c.k0;
        stats_ = c.stats;
        facold_ = c.facold;
        last_rejected_ = c.last_rejected;
    }

    /// One accepted step, never past s_limit. Returns the step length taken.
    Scalar step(Scalar s_limit = std::numeric_limits<Scalar>::infinity()) {
        using std::abs;
        using std::max;
        using std::min;
        using std::pow;
        using std::sqrt;
        const auto& tb = detail::dop853_tableau<Scalar>;
        constexpr Scalar safe = Scalar(0.9), facc1 = Scalar(1) / Scalar(0.333), facc2 = Scalar(1) / 6;
        constexpr Scalar beta = Scalar(0.04);
        const Scalar expo1 = Scalar(1) / 8 - beta * Scalar(0.2);
        const Scalar eps = std::numeric_limits<Scalar>::epsilon();

        for (;;) {
            if (stats_.accepted + stats_.rejected >= tol_.max_steps)
                throw IntegrationError("Dop853: maximum number of steps exceeded");
            Scalar h = min(h_, tol_.h_max);
            bool clamped = false;
            if (s_ + h >= s_limit) {
                h = s_limit - s_;
                clamped = true;
            }
            if (!(h > 16 * eps * max(abs(s_), Scalar(1))) && !clamped)
                throw IntegrationError("Dop853: step size underflow");

            State y_new;
            Scalar err;
            try {
                for (int i = 1; i < 12; ++i) {
                    State acc = tb.a[i][0] * k_[0];
                    for (int j = 1; j < i; ++j)
                        if (tb.a[i][j] != 0) acc += tb.a[i][j] * k_[j];
                    k_[i] = eval(s_ + tb.c[i] * h, y_ + h * acc);
                }
                State inc = tb.b[0] * k_[0];
                State e5 = tb.e5[0] * k_[0];
                State e3 = tb.e3[0] * k_[0];
                for (int j = 5; j < 12; ++j) {
                    inc += tb.b[j] * k_[j];
                    e5 += tb.e5[j] * k_[j];
                    e3 += tb.e3[j] * k_[j];
                }
                y_new = y_ + h * inc;
                State sk = (tol_.atol + tol_.rtol * y_.cwiseAbs().cwiseMax(y_new.cwiseAbs()).array()).matrix();
                if (tol_.clock_component >= 0) sk[tol_.clock_component] = tol_.atol + tol_.rtol;
                const Scalar n5 = e5.cwiseQuotient(sk).squaredNorm();
                const Scalar n3 = e3.cwiseQuotient(sk).squaredNorm();
                Scalar deno = n5 + Scalar(0.01) * n3;
                if (!(deno > 0)) deno = 1;
                err = abs(h) * n5 / sqrt(Scalar(N) * deno);
            } catch (const SingularStateError&) {
                reject(Scalar(0.25) * h);
                continue;
            }
            if (!std::isfinite(static_cast<double>(err)) || !y_new.allFinite()) {
                reject(Scalar(0.25) * h);
                continue;
            }

            const Scalar fac11 = pow(err, expo1);
            if (err <= 1) {
                const Scalar s_new = clamped ? s_limit : s_ + h;
                State k_new;
                try {
                    k_new = eval(s_new, y_new);
                } catch (const SingularStateError&) {
                    reject(Scalar(0.25) * h);
                    continue;
                }
                Scalar fac = fac11 / pow(facold_, beta);
                fac = max(facc2, min(facc1, fac / safe));
                Scalar h_new = h / fac;
                if (last_rejected_) h_new = min(h_new, h);
                facold_ = max(err, Scalar(1e-4));
                last_rejected_ = false;
                ++stats_.accepted;
                s_ = s_new;
                y_ = y_new;
                k_[0] = k_new;
                // A clamped final step says little about the natural step size.
                if (!clamped || h_new > h_) h_ = min(h_new, tol_.h_max);
                return h;
            }
            reject(h / min(facc1, fac11 / safe));
        }
    }

    /// Integrate to exactly s_end, calling observer(s, y) after every
    /// accepted step.
    template <typename Observer>
    void advance_to(Scalar s_end, Observer&& observer) {
        if (s_end < s_) throw std::invalid_argument("Dop853::advance_to: target behind current point");
        while (s_ < s_end) {
            step(s_end);
            observer(s_, y_);
        }
    }
    void advance_to(Scalar s_end) {
        advance_to(s_end, [](Scalar, const State&) {});
    }

private:
    State eval(Scalar s, const State& y) {
        ++stats_.evaluations;
        return f_(s, y);
    }

    void reject(Scalar h_new) {
        ++stats_.rejected;
        last_rejected_ = true;
        h_ = h_new;
    }

    Field f_;
    Tolerances<Scalar> tol_;
    Scalar s_;
    Scalar h_;
    State y_;
    std::array<State, 12> k_;
    StepStats stats_;
    Scalar facold_{Scalar(1e-4)};
    bool last_rejected_{false};
};

template <typename Scalar, int N>
struct AdaptiveResult {
    Eigen::Matrix<Scalar, N, 1> y;
    StepStats stats;
};

template <typename Scalar, int N, typename Field, typename Observer>
AdaptiveResult<Scalar, N> integrate_adaptive(Field f, const Eigen::Matrix<Scalar, N, 1>& y0, Scalar s0,
                                             Scalar s_end, const Tolerances<Scalar>& tol, Observer&& observer) {
    if (s_end < s0) throw std::invalid_argument("integrate_adaptive: s_end < s0");
    Dop853<Scalar, N, Field> st(std::move(f), tol, s0, y0);
    st.advance_to(s_end, std::forward<Observer>(observer));
    return {st.y(), st.stats()};
}

template <typename Scalar, int N, typename Field>
AdaptiveResult<Scalar, N> integrate_adaptive(Field f, const Eigen::Matrix<Scalar, N, 1>& y0, Scalar s0,
                                             Scalar s_end, const Tolerances<Scalar>& tol) {
    return integrate_adaptive(std::move(f), y0, s0, s_end, tol,
                              [](Scalar, const Eigen::Matrix<Scalar, N, 1>&) {});
}

/// Classical RK4 with n equal steps.
template <typename Scalar, int N, typename Field>
Eigen::Matrix<Scalar, N, 1> integrate_fixed_rk4(Field&& f, Eigen::Matrix<Scalar, N, 1> y, Scalar s0, Scalar s_end,
                                                long n) {
    if (n < 1) throw std::invalid_argument("integrate_fixed_rk4: need at least one step");
    const Scalar h = (s_end - s0) / Scalar(n);
    for (long i = 0; i < n; ++i) {
        const Scalar s = s0 + h * Scalar(i);
        const auto k1 = f(s, y);
        const auto k2 = f(s + h / 2, (y + h / 2 * k1).eval());
        const auto k3 = f(s + h / 2, (y + h / 2 * k2).eval());
        const auto k4 = f(s + h, (y + h * k3).eval());
        y += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    return y;
}

/// Step a regularized integration until the physical time read by
/// time_of(s, y) reaches T, then shrink the final step (Illinois regula falsi
/// on the step length) until |t - T| <= tol_t. Work spent on discarded trial
/// steps is charged to the stepper's statistics.
template <typename Stepper, typename TimeOf, typename Scalar>
void land_on_epoch(Stepper& st, TimeOf&& time_of, Scalar T, Scalar tol_t, int max_iter = 60) {
    using std::abs;
    using std::max;
    if (!(tol_t > 0)) tol_t = 32 * std::numeric_limits<Scalar>::epsilon() * max(Scalar(1), abs(T));
    Scalar t_now = time_of(st.s(), st.y());
    if (T < t_now - tol_t) throw IntegrationError("land_on_epoch: target epoch precedes current time");
    if (abs(T - t_now) <= tol_t) return;

    for (;;) {
        const auto prev = st.checkpoint();
        st.step();
        const Scalar t_new = time_of(st.s(), st.y());
        if (!(t_new > t_now)) throw IntegrationError("land_on_epoch: physical time is not increasing");
        if (abs(t_new - T) <= tol_t) return;
        if (t_new < T) {
            t_now = t_new;
            continue;
        }

        const Scalar h_next = st.step_size();
        const Scalar big = st.s() - prev.s;
        StepStats spent = st.stats() - prev.stats;
        Scalar lo = 0, f_lo = t_now - T, hi = big, f_hi = t_new - T;
        int side = 0;
        for (int it = 0; it < max_iter; ++it) {
            Scalar sigma = (lo * f_hi - hi * f_lo) / (f_hi - f_lo);
            if (!(sigma > lo && sigma < hi)) sigma = (lo + hi) / 2;
            st.restore(prev);
            st.set_step_size(big);
            st.advance_to(prev.s + sigma);
            const Scalar f = time_of(st.s(), st.y()) - T;
            const StepStats trial = st.stats() - prev.stats;
            spent += trial;
            if (abs(f) <= tol_t) {
                st.charge(spent - trial);
                st.set_step_size(h_next);
                return;
            }
            if (f < 0) {
                lo = sigma;
                f_lo = f;
                if (side == -1) f_hi /= 2;
                side = -1;
            } else {
                hi = sigma;
                f_hi = f;
                if (side == 1) f_lo /= 2;
                side = 1;
            }
        }
        throw IntegrationError("land_on_epoch: iteration cap exceeded");
    }
}

}  // namespace ideal
