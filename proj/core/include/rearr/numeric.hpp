#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rearr {

/// Volume of the unit ball in dimension n (c_1 = 2, c_2 = pi, c_3 = 4pi/3).
double unit_ball_volume(int dimension);

/// Compensated (Kahan) accumulator. Energy sums and modulars run through
/// this so that margins near zero are trustworthy to discretization error,
/// not to N*eps roundoff.
class KahanSum {
public:
    void add(double x) {
        const double y = x - compensation_;
        const double t = sum_ + y;
        compensation_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const { return sum_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

double kahan_total(std::span<const double> xs);

/// Shortest decimal string that parses back to exactly the same double.
std::string format_double(double v);

/// Strict parse; throws std::runtime_error mentioning `what` on failure.
double parse_double(std::string_view text, const std::string& what);
std::int64_t parse_int(std::string_view text, const std::string& what);

/// Worker-thread cap honoring the REARRANGE_THREADS environment variable.
int thread_count();

/// Runs fn(begin, end) over [0, count) split into contiguous chunks, possibly
/// from several threads. Callers own determinism: chunk boundaries are fixed
/// and any reduction must happen per-chunk with an ordered merge.
void parallel_chunks(std::int64_t count,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn);

/// Least-squares slope of y against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

}  // namespace rearr
