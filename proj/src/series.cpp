#include "novas/series.hpp"

#include "novas/errors.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace novas {

PriceSeries::PriceSeries(std::vector<double> values, std::vector<std::string> labels)
    : values_(std::move(values)), labels_(std::move(labels)) {
    if (values_.size() < 2) {
        throw std::invalid_argument("price series needs at least two points");
    }
    if (!labels_.empty() && labels_.size() != values_.size()) {
        throw std::invalid_argument("price labels must match prices in length");
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i]) || values_[i] <= 0.0) {
            throw std::domain_error("price at index " + std::to_string(i) +
                                    " is not a positive finite number");
        }
    }
}

ReturnSeries::ReturnSeries(std::vector<double> values) : values_(std::move(values)) {
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw std::domain_error("return at index " + std::to_string(i) + " is not finite");
        }
    }
}

ReturnSeries ReturnSeries::slice(std::size_t first, std::size_t count) const {
    if (first + count > values_.size()) {
        throw std::out_of_range("return slice exceeds series length");
    }
    ReturnSeries out;
    out.values_.assign(values_.begin() + static_cast<std::ptrdiff_t>(first),
                       values_.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

ReturnSeries to_log_returns(const PriceSeries& prices) {
    const auto x = prices.values();
    std::vector<double> y(x.size() - 1);
    for (std::size_t t = 0; t + 1 < x.size(); ++t) {
        y[t] = 100.0 * std::log(x[t + 1] / x[t]);
    }
    return ReturnSeries(std::move(y));
}

TrailingStats trailing_stats(std::span<const double> returns, std::size_t t) {
    if (t < 2 || t - 1 > returns.size()) {
        throw std::invalid_argument("trailing_stats needs 1 <= t-1 <= series length");
    }
    const auto prefix = returns.first(t - 1);
    const double k = static_cast<double>(prefix.size());
    const double mu = std::accumulate(prefix.begin(), prefix.end(), 0.0) / k;
    double ss = 0.0;
    for (double y : prefix) {
        ss += (y - mu) * (y - mu);
    }
    return {ss / k, mu};
}

std::vector<double> prefix_variances(std::span<const double> returns) {
    std::vector<double> out(returns.size());
    double mean = 0.0;
    double m2 = 0.0;
    for (std::size_t i = 0; i < returns.size(); ++i) {
        const double delta = returns[i] - mean;
        mean += delta / static_cast<double>(i + 1);
        m2 += delta * (returns[i] - mean);
        out[i] = m2 / static_cast<double>(i + 1);
    }
    return out;
}

double sample_kurtosis(std::span<const double> xs) {
    if (xs.size() < 4) {
        throw std::invalid_argument("kurtosis needs at least four points");
    }
    const double n = static_cast<double>(xs.size());
    const double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    double m2 = 0.0;
    double m4 = 0.0;
    for (double x : xs) {
        const double d2 = (x - mu) * (x - mu);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    if (!(m2 > 0.0)) {
        throw DegenerateDataError("kurtosis of a zero-variance sample");
    }
    return m4 / (m2 * m2);
}

double ljung_box(std::span<const double> xs, std::size_t lags) {
    const std::size_t n = xs.size();
    if (lags == 0 || lags >= n) {
        throw std::invalid_argument("ljung_box needs 1 <= lags < length");
    }
    const double mu = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(n);
    double denom = 0.0;
    for (double x : xs) {
        denom += (x - mu) * (x - mu);
    }
    if (!(denom > 0.0)) {
        throw DegenerateDataError("ljung_box of a zero-variance sample");
    }
    double q = 0.0;
    for (std::size_t k = 1; k <= lags; ++k) {
        double num = 0.0;
        for (std::size_t t = k; t < n; ++t) {
            num += (xs[t] - mu) * (xs[t - k] - mu);
        }
        const double rho = num / denom;
        q += rho * rho / static_cast<double>(n - k);
    }
    return static_cast<double>(n) * static_cast<double>(n + 2) * q;
}

std::vector<Window> rolling_windows(std::size_t length, std::size_t width) {
    if (width == 0 || width >= length) {
        throw std::invalid_argument("rolling window width must satisfy 0 < width < length");
    }
    std::vector<Window> out;
    out.reserve(length - width);
    for (std::size_t first = 0; first + width < length; ++first) {
        out.push_back({first, width, first + width});
    }
    return out;
}

} // namespace novas
