#include "rearr/numeric.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <thread>

namespace rearr {

double unit_ball_volume(int dimension) {
    if (dimension < 1) throw std::invalid_argument("dimension must be >= 1");
    const double n = static_cast<double>(dimension);
    return std::pow(M_PI, n / 2.0) / std::tgamma(n / 2.0 + 1.0);
}

double kahan_total(std::span<const double> xs) {
    KahanSum acc;
    for (double x : xs) acc.add(x);
    return acc.value();
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text, const std::string& what) {
    double value = 0.0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::runtime_error("malformed number in " + what + ": '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view text, const std::string& what) {
    std::int64_t value = 0;
    const char* first = text.data();
    const char* last = text.data() + text.size();
    const auto res = std::from_chars(first, last, value);
    if (res.ec != std::errc{} || res.ptr != last) {
        throw std::runtime_error("malformed integer in " + what + ": '" + std::string(text) + "'");
    }
    return value;
}

int thread_count() {
    int hw = static_cast<int>(std::thread::hardware_concurrency());
    if (hw < 1) hw = 1;
    if (const char* env = std::getenv("REARRANGE_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap >= 1) hw = std::min<long>(hw, cap);
    }
    return hw;
}

void parallel_chunks(std::int64_t count,
                     const std::function<void(std::int64_t, std::int64_t, int)>& fn) {
    if (count <= 0) return;
    const int threads = std::min<std::int64_t>(thread_count(), count);
    if (threads <= 1) {
        fn(0, count, 0);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(threads);
    const std::int64_t chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        const std::int64_t begin = t * chunk;
        const std::int64_t end = std::min(count, begin + chunk);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end, t] { fn(begin, end, t); });
    }
    for (auto& th : pool) th.join();
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) {
        throw std::invalid_argument("fit_slope needs two equally sized samples");
    }
    const double n = static_cast<double>(x.size());
    KahanSum sx, sy, sxx, sxy;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx.add(x[i]);
        sy.add(y[i]);
        sxx.add(x[i] * x[i]);
        sxy.add(x[i] * y[i]);
    }
    const double denom = n * sxx.value() - sx.value() * sx.value();
    if (denom == 0.0) throw std::invalid_argument("fit_slope: degenerate abscissae");
    return (n * sxy.value() - sx.value() * sy.value()) / denom;
}

}  // namespace rearr
