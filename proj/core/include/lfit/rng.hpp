#pragma once

#include <cstdint>
#include <random>

namespace lfit
{

// Portable sampling on top of mt19937_64, whose output sequence is fixed by
// the standard. The std distributions are implementation-defined and would
// make generated artifacts differ between standard libraries.
class rng
{
    std::mt19937_64 _engine;

public:
    explicit rng( std::uint64_t seed ) : _engine{ seed } {}

    std::uint64_t next() { return _engine(); }

    // Uniform integer in [0, n). n must be positive.
    std::uint64_t below( std::uint64_t n )
    {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = 0;
        do
            x = _engine();
        while ( x >= limit );
        return x % n;
    }

    // Uniform double in [0, 1).
    double unit() { return static_cast< double >( _engine() >> 11 ) * 0x1.0p-53; }

    // Uniform double in [lo, hi).
    double uniform( double lo, double hi ) { return lo + ( hi - lo ) * unit(); }
};

// splitmix64 finaliser over (seed, stream); used to give independent chunks
// and workers their own reproducible engines.
constexpr std::uint64_t derive_seed( std::uint64_t seed, std::uint64_t stream )
{
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * ( stream + 1 );
    z = ( z ^ ( z >> 30 ) ) * 0xbf58476d1ce4e5b9ULL;
    z = ( z ^ ( z >> 27 ) ) * 0x94d049bb133111ebULL;
    return z ^ ( z >> 31 );
}

} // namespace lfit
