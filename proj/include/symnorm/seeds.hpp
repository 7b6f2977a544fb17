#ifndef SYMNORM_SEEDS_HPP
#define SYMNORM_SEEDS_HPP

#include <cstdint>
#include <initializer_list>
#include <string_view>

namespace symnorm::seeds {

// splitmix64 finalizer; full-avalanche 64-bit mixer.
inline uint64_t mix(uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline uint64_t combine(uint64_t seed, uint64_t v) {
    return mix(seed ^ (v + 0x9e3779b97f4a7c15ULL + (seed << 6) + (seed >> 2)));
}

// Short textual labels keep seed derivations self-describing: every stream of
// randomness in the project comes from derive(root, {label("..."), indices...}).
constexpr uint64_t label(std::string_view s) {
    uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline uint64_t derive(uint64_t root, std::initializer_list<uint64_t> parts) {
    uint64_t s = mix(root);
    for (uint64_t p : parts) s = combine(s, p);
    return s;
}

}  // namespace symnorm::seeds

#endif
