#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace novas {

/// Closing prices in currency units, optionally labelled by date.
class PriceSeries {
public:
    /// Throws std::invalid_argument on fewer than two points or a label/value
    /// size mismatch, std::domain_error naming the index of a nonpositive or
    /// non-finite price.
    explicit PriceSeries(std::vector<double> values, std::vector<std::string> labels = {});

    std::span<const double> values() const noexcept { return values_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    std::size_t size() const noexcept { return values_.size(); }

private:
    std::vector<double> values_;
    std::vector<std::string> labels_;
};

/// Percent log-returns, 100 * log(X_{t+1} / X_t). Finite values only.
class ReturnSeries {
public:
    ReturnSeries() = default;
    explicit ReturnSeries(std::vector<double> values);

    std::span<const double> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    bool empty() const noexcept { return values_.empty(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }

    /// Copy of `count` points starting at 0-based `first`.
    ReturnSeries slice(std::size_t first, std::size_t count) const;

    friend bool operator==(const ReturnSeries&, const ReturnSeries&) = default;

private:
    std::vector<double> values_;
};

/// Mean and population variance of a return prefix.
struct TrailingStats {
    double s_sq = 0.0;
    double mu = 0.0;
};

ReturnSeries to_log_returns(const PriceSeries& prices);

/// Statistics of Y_1..Y_{t-1} (1-based t), variance divisor t-1.
/// Requires 2 <= t <= returns.size() + 1.
TrailingStats trailing_stats(std::span<const double> returns, std::size_t t);

/// prefix_variances(y)[k] is the population variance of y[0..k], i.e. the
/// trailing s^2 that precedes 0-based point k+1. One pass, Welford updates.
std::vector<double> prefix_variances(std::span<const double> returns);

/// Raw (non-excess) kurtosis m4 / m2^2. Needs >= 4 points and nonzero variance.
double sample_kurtosis(std::span<const double> xs);

/// Ljung-Box Q statistic over lags 1..lags. Diagnostic for serial correlation
/// left in a transformed series; compare against chi-square(lags).
double ljung_box(std::span<const double> xs, std::size_t lags);

/// One rolling window: `width` points starting at 0-based `first`; `target`
/// is the 0-based index of the first point after the window.
struct Window {
    std::size_t first = 0;
    std::size_t width = 0;
    std::size_t target = 0;

    friend bool operator==(const Window&, const Window&) = default;
};

/// Windows of exactly `width` points advancing by one: length - width of them.
/// Throws std::invalid_argument when width == 0 or width >= length.
std::vector<Window> rolling_windows(std::size_t length, std::size_t width);

} // namespace novas
