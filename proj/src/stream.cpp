#include "symnorm/stream.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace symnorm {

uint64_t default_magnitude_bound(size_t n) {
    long double m = static_cast<long double>(n);
    long double b = m * m * m;
    if (b > 9.0e18L) return UINT64_C(9000000000000000000);
    return static_cast<uint64_t>(b);
}

FrequencyVector::FrequencyVector(size_t n, uint64_t magnitude_bound)
    : values_(n, 0),
      bound_(magnitude_bound == 0 ? default_magnitude_bound(n) : magnitude_bound) {}

void FrequencyVector::apply(const StreamUpdate& u) {
    if (u.index < 0 || static_cast<size_t>(u.index) >= values_.size())
        throw std::out_of_range("stream update index out of range");
    int64_t next = values_[u.index] + u.delta;
    if (static_cast<uint64_t>(next < 0 ? -next : next) > bound_)
        throw std::overflow_error("stream magnitude bound exceeded");
    values_[u.index] = next;
}

void FrequencyVector::apply_all(std::span<const StreamUpdate> updates) {
    for (const auto& u : updates) apply(u);
}

size_t FrequencyVector::nonzero_count() const {
    size_t c = 0;
    for (int64_t v : values_)
        if (v != 0) ++c;
    return c;
}

std::vector<double> FrequencyVector::abs_values() const {
    std::vector<double> out(values_.size());
    for (size_t i = 0; i < values_.size(); ++i)
        out[i] = std::abs(static_cast<double>(values_[i]));
    return out;
}

FrequencyVector replay(std::span<const StreamUpdate> updates, size_t n,
                       uint64_t magnitude_bound) {
    FrequencyVector v(n, magnitude_bound);
    v.apply_all(updates);
    return v;
}

std::vector<StreamUpdate> read_stream(std::istream& in) {
    std::vector<StreamUpdate> out;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        StreamUpdate u;
        if (ls >> u.index >> u.delta) out.push_back(u);
    }
    return out;
}

std::vector<StreamUpdate> read_stream_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open stream file: " + path);
    return read_stream(f);
}

void write_stream(std::ostream& out, std::span<const StreamUpdate> updates) {
    for (const auto& u : updates) out << u.index << ' ' << u.delta << '\n';
}

void write_stream_file(const std::string& path, std::span<const StreamUpdate> updates) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open stream file for write: " + path);
    write_stream(f, updates);
}

}  // namespace symnorm
