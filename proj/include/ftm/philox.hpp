#pragma once
// Philox4x32-10 counter-based generator (Salmon et al., Random123). A
// stream is addressed by (key, counter); no state is carried between
// streams, so any episode can be regenerated independently.

#include <array>
#include <cstdint>

namespace ftm {

class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter ctr, Key key) {
        for (int round = 0; round < 10; ++round) {
            if (round > 0) {
                key[0] += kWeyl0;
                key[1] += kWeyl1;
            }
            const std::uint64_t p0 = std::uint64_t{kMul0} * ctr[0];
            const std::uint64_t p1 = std::uint64_t{kMul1} * ctr[2];
            ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ key[0], static_cast<std::uint32_t>(p1),
                   static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ key[1], static_cast<std::uint32_t>(p0)};
        }
        return ctr;
    }

private:
    static constexpr std::uint32_t kMul0 = 0xD2511F53u;
    static constexpr std::uint32_t kMul1 = 0xCD9E8D57u;
    static constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
    static constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;
};

// Uniform doubles for one (seed, index, stream) triple. Counter word 0 is the
// block number within the stream.
class UniformStream {
public:
    UniformStream(std::uint64_t seed, std::uint64_t index, std::uint32_t stream = 0)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          ctr_{0, static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), stream} {}

    // 53-bit uniform in [0, 1); two draws per Philox block.
    double next() {
        if (pos_ == 4) {
            buf_ = Philox4x32::block(ctr_, key_);
            ++ctr_[0];
            pos_ = 0;
        }
        const std::uint64_t hi = buf_[pos_], lo = buf_[pos_ + 1];
        pos_ += 2;
        return static_cast<double>(((hi << 32) | lo) >> 11) * 0x1.0p-53;
    }

private:
    Philox4x32::Key key_;
    Philox4x32::Counter ctr_;
    Philox4x32::Counter buf_{};
    int pos_ = 4;
};

}  // namespace ftm
