#include "acop/marginal.hpp"

#include <cmath>
#include <stdexcept>

#include "acop/error.hpp"
#include "acop/special.hpp"

namespace acop {

SeasonalNigMarginal::SeasonalNigMarginal(const NigParams& shared, YearMonth first, std::span<const double> deltas,
                                         std::optional<std::array<double, 12>> climatology)
    : shared_(shared), first_(first) {
    by_month_.reserve(deltas.size());
    for (double d : deltas) by_month_.push_back(make(d));
    if (climatology) {
        climatology_.emplace();
        for (std::size_t m = 0; m < 12; ++m) (*climatology_)[m] = make((*climatology)[m]);
    }
}

namespace {

std::vector<double> deltas_of(const MonthlyDeltaSeries& series) {
    std::vector<double> out;
    out.reserve(series.size());
    for (const auto& e : series.entries()) out.push_back(e.delta);
    return out;
}

}  // namespace

SeasonalNigMarginal::SeasonalNigMarginal(const NigParams& shared, const MonthlyDeltaSeries& series, bool extrapolate)
    : SeasonalNigMarginal(shared, series.empty() ? YearMonth{} : series.entries().front().month, deltas_of(series),
                          extrapolate && !series.empty() ? std::optional(series.climatology()) : std::nullopt) {}

std::shared_ptr<const NigDistribution> SeasonalNigMarginal::make(double delta) {
    auto it = cache_.find(delta);
    if (it != cache_.end()) return it->second;
    auto dist = std::make_shared<const NigDistribution>(shared_.with_delta(delta));
    cache_.emplace(delta, dist);
    return dist;
}

const NigDistribution& SeasonalNigMarginal::distribution(YearMonth ym) const {
    const int offset = ym.index() - first_.index();
    if (offset >= 0 && offset < static_cast<int>(by_month_.size())) return *by_month_[static_cast<std::size_t>(offset)];
    if (climatology_) return *(*climatology_)[ym.month - 1];
    throw DataError("no marginal distribution for month " + ym.str());
}

double SeasonalNigMarginal::cdf(Date date, double x) const { return distribution(year_month_of(date)).cdf(x); }

double SeasonalNigMarginal::quantile(Date date, double q) const {
    return distribution(year_month_of(date)).quantile(q);
}

NormalMarginal::NormalMarginal(double mean, double sd) : mean_(mean), sd_(sd) {
    if (!std::isfinite(mean) || !(sd > 0.0) || !std::isfinite(sd)) {
        throw std::invalid_argument("normal marginal: require finite mean and sd > 0");
    }
}

double NormalMarginal::cdf(Date, double x) const { return normal_cdf((x - mean_) / sd_); }

double NormalMarginal::quantile(Date, double q) const {
    if (!(q > 0.0 && q < 1.0)) throw DomainError("normal quantile: q must lie in (0,1)");
    return mean_ + sd_ * normal_quantile(q);
}

}  // namespace acop
