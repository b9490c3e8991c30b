#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "acop/calendar.hpp"
#include "acop/nig.hpp"
#include "acop/seasonal_delta.hpp"

namespace acop {

/// Time-varying marginal law F_t of the observed series.
class MarginalModel {
public:
    virtual ~MarginalModel() = default;
    [[nodiscard]] virtual double cdf(Date date, double x) const = 0;
    /// q in (0,1); extreme probabilities are clamped by the implementation.
    [[nodiscard]] virtual double quantile(Date date, double q) const = 0;
};

/// NIG marginal with global (mu, alpha, beta) and one delta per calendar
/// month. Months are looked up by the calendar month containing the date.
class SeasonalNigMarginal final : public MarginalModel {
public:
    /// `deltas[k]` applies to YearMonth::from_index(first.index() + k).
    /// With `climatology`, months outside the range use the delta of their
    /// calendar month; without it they raise DataError.
    SeasonalNigMarginal(const NigParams& shared, YearMonth first, std::span<const double> deltas,
                        std::optional<std::array<double, 12>> climatology = std::nullopt);

    /// Range taken from `series`; climatology fallback from the same series
    /// when `extrapolate` is set.
    SeasonalNigMarginal(const NigParams& shared, const MonthlyDeltaSeries& series, bool extrapolate);

    [[nodiscard]] double cdf(Date date, double x) const override;
    [[nodiscard]] double quantile(Date date, double q) const override;

    [[nodiscard]] const NigDistribution& distribution(YearMonth ym) const;
    [[nodiscard]] const NigParams& shared() const noexcept { return shared_; }
    [[nodiscard]] std::size_t distinct_distributions() const noexcept { return cache_.size(); }

private:
    std::shared_ptr<const NigDistribution> make(double delta);

    NigParams shared_;
    YearMonth first_;
    std::vector<std::shared_ptr<const NigDistribution>> by_month_;
    std::optional<std::array<std::shared_ptr<const NigDistribution>, 12>> climatology_;
    std::map<double, std::shared_ptr<const NigDistribution>> cache_;
};

/// One fixed NIG law for every date.
class StaticNigMarginal final : public MarginalModel {
public:
    explicit StaticNigMarginal(const NigParams& params) : dist_(params) {}
    [[nodiscard]] double cdf(Date, double x) const override { return dist_.cdf(x); }
    [[nodiscard]] double quantile(Date, double q) const override { return dist_.quantile(q); }

private:
    NigDistribution dist_;
};

/// N(mean, sd^2) for every date.
class NormalMarginal final : public MarginalModel {
public:
    NormalMarginal(double mean, double sd);
    [[nodiscard]] double cdf(Date, double x) const override;
    [[nodiscard]] double quantile(Date, double q) const override;

private:
    double mean_;
    double sd_;
};

/// Degenerate law concentrated at one value.
class ConstantMarginal final : public MarginalModel {
public:
    explicit ConstantMarginal(double value) : value_(value) {}
    [[nodiscard]] double cdf(Date, double x) const override { return x < value_ ? 0.0 : 1.0; }
    [[nodiscard]] double quantile(Date, double) const override { return value_; }

private:
    double value_;
};

}  // namespace acop
