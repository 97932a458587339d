#include "swarmforecast/timeseries.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "swarmforecast/errors.hpp"
#include "format_util.hpp"

namespace swarmforecast {

YearMonth YearMonth::from_index(int idx) {
    int year = idx / 12;
    int rem = idx % 12;
    if (rem < 0) { // floor division for negative indices
        year -= 1;
        rem += 12;
    }
    return YearMonth{year, rem + 1};
}

std::string YearMonth::str() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d", year, month);
    return buf;
}

YearMonth YearMonth::parse(std::string_view text) {
    auto bad = [&] {
        return ValidationError("bad month '" + std::string(text) + "', expected YYYY-MM");
    };
    if (text.size() != 7 || text[4] != '-') throw bad();
    for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u})
        if (text[i] < '0' || text[i] > '9') throw bad();
    YearMonth ym;
    ym.year = (text[0] - '0') * 1000 + (text[1] - '0') * 100 + (text[2] - '0') * 10 +
              (text[3] - '0');
    ym.month = (text[5] - '0') * 10 + (text[6] - '0');
    if (ym.month < 1 || ym.month > 12) throw bad();
    return ym;
}

TimeSeries::TimeSeries(std::vector<Point> points) : points_(std::move(points)) {
    if (points_.empty()) throw ValidationError("time series must not be empty");
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const Point& p = points_[i];
        if (!std::isfinite(p.value) || p.value <= 0.0)
            throw ValidationError("non-positive or non-finite value at " + p.month.str());
        if (i > 0) {
            int gap = p.month.index() - points_[i - 1].month.index();
            if (gap == 0)
                throw ValidationError("duplicate month " + p.month.str());
            if (gap < 0)
                throw ValidationError("months out of order at " + p.month.str());
            if (gap > 1)
                throw ValidationError("gap in months: missing " +
                                      points_[i - 1].month.next().str());
        }
    }
}

std::vector<double> TimeSeries::values() const {
    std::vector<double> out;
    out.reserve(points_.size());
    for (const Point& p : points_) out.push_back(p.value);
    return out;
}

namespace {

// Splits on '\n', strips one trailing '\r'.
std::vector<std::string_view> split_lines(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t nl = text.find('\n', start);
        std::string_view line = (nl == std::string_view::npos)
                                    ? text.substr(start)
                                    : text.substr(start, nl - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        lines.push_back(line);
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }
    return lines;
}

} // namespace

TimeSeries parse_series_csv(std::string_view text) {
    std::vector<TimeSeries::Point> points;
    bool header_seen = false;
    const auto lines = split_lines(text);
    for (std::size_t li = 0; li < lines.size(); ++li) {
        std::string_view line = lines[li];
        const std::string where = "line " + std::to_string(li + 1);
        if (line.empty() || line.front() == '#') continue;
        if (!header_seen) {
            if (line != "month,value")
                throw ValidationError(where + ": expected header 'month,value', got '" +
                                      std::string(line) + "'");
            header_seen = true;
            continue;
        }
        std::size_t comma = line.find(',');
        if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
            throw ValidationError(where + ": expected 'YYYY-MM,<value>', got '" +
                                  std::string(line) + "'");
        YearMonth month;
        try {
            month = YearMonth::parse(line.substr(0, comma));
        } catch (const ValidationError& e) {
            throw ValidationError(where + ": " + e.what());
        }
        double value = 0.0;
        if (!detail::parse_double(line.substr(comma + 1), value))
            throw ValidationError(where + ": bad value '" + std::string(line.substr(comma + 1)) +
                                  "'");
        if (!std::isfinite(value) || value <= 0.0)
            throw ValidationError(where + ": non-positive or non-finite value at " + month.str());
        points.push_back({month, value});
    }
    if (!header_seen) throw ValidationError("missing header 'month,value'");
    if (points.size() < 2) throw ValidationError("need at least 2 data rows");
    std::stable_sort(points.begin(), points.end(),
                     [](const auto& a, const auto& b) { return a.month < b.month; });
    return TimeSeries(std::move(points));
}

std::string serialize_series_csv(const TimeSeries& series) {
    std::string out = "month,value\n";
    for (const auto& p : series.points()) {
        out += p.month.str();
        out += ',';
        out += detail::format_double(p.value);
        out += '\n';
    }
    return out;
}

NormalizationParams fit_normalization(const TimeSeries& series) {
    double lo = series.at(0).value;
    double hi = lo;
    for (const auto& p : series.points()) {
        lo = std::min(lo, p.value);
        hi = std::max(hi, p.value);
    }
    if (!(lo < hi))
        throw ValidationError("degenerate value range: all values equal " +
                              detail::format_double(lo));
    return NormalizationParams{lo, hi};
}

double normalize(double value, const NormalizationParams& params) {
    return (value - params.min) / (params.max - params.min);
}

double denormalize(double value, const NormalizationParams& params) {
    return value * (params.max - params.min) + params.min;
}

WindowedDataset make_windows(const TimeSeries& series, std::size_t window_len,
                             const NormalizationParams& params) {
    if (window_len < 1) throw ValidationError("window_len must be >= 1");
    if (series.size() <= window_len)
        throw ValidationError("series too short: " + std::to_string(series.size()) +
                              " months cannot fill a window of " + std::to_string(window_len) +
                              " plus a target");
    WindowedDataset ds;
    ds.window_len = window_len;
    ds.norm = params;
    const std::size_t count = series.size() - window_len;
    ds.samples.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Sample s;
        s.inputs.reserve(window_len);
        for (std::size_t k = 0; k < window_len; ++k)
            s.inputs.push_back(normalize(series.at(i + k).value, params));
        s.targets.push_back(normalize(series.at(i + window_len).value, params));
        ds.samples.push_back(std::move(s));
    }
    return ds;
}

std::pair<TimeSeries, TimeSeries> split_train_test(const TimeSeries& series,
                                                   YearMonth boundary) {
    if (boundary <= series.first_month())
        throw ValidationError("split boundary " + boundary.str() +
                              " leaves an empty training part");
    if (boundary > series.last_month())
        throw ValidationError("split boundary " + boundary.str() +
                              " is outside the series range " + series.first_month().str() +
                              ".." + series.last_month().str());
    std::vector<TimeSeries::Point> head, tail;
    for (const auto& p : series.points())
        (p.month < boundary ? head : tail).push_back(p);
    return {TimeSeries(std::move(head)), TimeSeries(std::move(tail))};
}

} // namespace swarmforecast
