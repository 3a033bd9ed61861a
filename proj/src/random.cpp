#include "bsync/random.hpp"

#include <stdexcept>

namespace bsync {

BigInt RandomSource::below(const BigInt& n) {
    if (n <= 0) throw std::invalid_argument("RandomSource::below needs a positive bound");
    if (n.fits_ulong_p()) return BigInt(below(static_cast<std::uint64_t>(n.get_ui())));
    const std::size_t bits = mpz_sizeinbase(n.get_mpz_t(), 2);
    for (;;) {
        BigInt r = 0;
        std::size_t have = 0;
        while (have < bits) {
            r <<= 64;
            const std::uint64_t w = next();
            BigInt word;
            mpz_import(word.get_mpz_t(), 1, 1, sizeof w, 0, 0, &w);
            r += word;
            have += 64;
        }
        r >>= static_cast<mp_bitcnt_t>(have - bits);
        if (r < n) return r;
    }
}

}  // namespace bsync
