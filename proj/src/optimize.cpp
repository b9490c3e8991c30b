#include "acop/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace acop {

namespace {

struct Simplex {
    std::vector<std::vector<double>> vertices;
    std::vector<double> values;

    void sort() {
        std::vector<std::size_t> order(values.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        std::vector<std::vector<double>> v;
        std::vector<double> f;
        v.reserve(order.size());
        f.reserve(order.size());
        for (std::size_t i : order) {
            v.push_back(std::move(vertices[i]));
            f.push_back(values[i]);
        }
        vertices = std::move(v);
        values = std::move(f);
    }
};

}  // namespace

NelderMeadResult nelder_mead(const std::function<double(std::span<const double>)>& objective,
                             std::vector<double> start, std::span<const double> step,
                             const NelderMeadOptions& options) {
    const std::size_t n = start.size();
    if (n == 0 || step.size() != n) throw std::invalid_argument("nelder_mead: dimension mismatch");

    NelderMeadResult result;
    auto eval = [&](const std::vector<double>& x) {
        ++result.evaluations;
        const double v = objective(x);
        return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
    };

    auto build = [&](const std::vector<double>& centre, double centre_value) {
        Simplex s;
        s.vertices.push_back(centre);
        s.values.push_back(centre_value);
        for (std::size_t i = 0; i < n; ++i) {
            auto v = centre;
            v[i] += step[i];
            s.values.push_back(eval(v));
            s.vertices.push_back(std::move(v));
        }
        return s;
    };

    constexpr double kReflect = 1.0;
    constexpr double kExpand = 2.0;
    constexpr double kContract = 0.5;
    constexpr double kShrink = 0.5;

    std::vector<double> best = std::move(start);
    double best_value = eval(best);
    std::size_t restarts = 0;

    while (true) {
        Simplex s = build(best, best_value);
        bool converged = false;
        std::vector<double> centroid(n);
        std::vector<double> trial(n);
        auto along = [&](double t, std::vector<double>& out) {
            const auto& worst = s.vertices[n];
            for (std::size_t i = 0; i < n; ++i) out[i] = centroid[i] + t * (centroid[i] - worst[i]);
        };

        while (result.iterations < options.max_iterations) {
            s.sort();
            if (s.values[n] - s.values[0] <= options.f_tolerance) {
                converged = true;
                break;
            }
            ++result.iterations;

            std::fill(centroid.begin(), centroid.end(), 0.0);
            for (std::size_t j = 0; j < n; ++j)
                for (std::size_t i = 0; i < n; ++i) centroid[i] += s.vertices[j][i];
            for (double& c : centroid) c /= static_cast<double>(n);

            along(kReflect, trial);
            const double fr = eval(trial);
            if (fr < s.values[0]) {
                std::vector<double> expanded(n);
                along(kExpand, expanded);
                const double fe = eval(expanded);
                if (fe < fr) {
                    s.vertices[n] = std::move(expanded);
                    s.values[n] = fe;
                } else {
                    s.vertices[n] = trial;
                    s.values[n] = fr;
                }
                continue;
            }
            if (fr < s.values[n - 1]) {
                s.vertices[n] = trial;
                s.values[n] = fr;
                continue;
            }
            const bool outside = fr < s.values[n];
            std::vector<double> contracted(n);
            along(outside ? kContract : -kContract, contracted);
            const double fc = eval(contracted);
            if (fc < (outside ? fr : s.values[n])) {
                s.vertices[n] = std::move(contracted);
                s.values[n] = fc;
                continue;
            }
            for (std::size_t j = 1; j <= n; ++j) {
                for (std::size_t i = 0; i < n; ++i) {
                    s.vertices[j][i] = s.vertices[0][i] + kShrink * (s.vertices[j][i] - s.vertices[0][i]);
                }
                s.values[j] = eval(s.vertices[j]);
            }
        }
        s.sort();
        const double improvement = best_value - s.values[0];
        if (s.values[0] <= best_value) {
            best = s.vertices[0];
            best_value = s.values[0];
        }
        if (!converged) {
            result.converged = false;
            break;
        }
        if (restarts >= options.max_restarts || improvement <= options.f_tolerance) {
            result.converged = true;
            break;
        }
        ++restarts;
    }

    result.x = std::move(best);
    result.f = best_value;
    return result;
}

ScalarMinimum golden_section_minimize(const std::function<double(double)>& f, double lo, double hi,
                                      double tolerance) {
    if (!(lo < hi)) throw std::invalid_argument("golden_section_minimize: empty bracket");
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c);
    double fd = f(d);
    ScalarMinimum out;
    while (b - a > tolerance) {
        ++out.iterations;
        if (fc <= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if (fc <= fd) {
        out.x = c;
        out.f = fc;
    } else {
        out.x = d;
        out.f = fd;
    }
    return out;
}

}  // namespace acop
