#include "waterfill/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "waterfill/errors.hpp"

namespace waterfill {

namespace {

PsnrResult from_mse(double mse) {
    PsnrResult r;
    r.mse = mse;
    if (mse == 0.0) {
        r.psnr_db = std::numeric_limits<double>::infinity();
    } else {
        r.psnr_db = 20.0 * std::log10(255.0 / std::sqrt(mse));
    }
    return r;
}

// Decodes UTF-8 into scalar values; every malformed byte becomes its own
// symbol so binary garbage still yields a sane distance.
std::vector<char32_t> decode_utf8(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char c = static_cast<unsigned char>(s[i]);
        int extra = 0;
        char32_t cp = 0;
        if (c < 0x80) {
            cp = c;
        } else if ((c & 0xE0) == 0xC0) {
            cp = c & 0x1F;
            extra = 1;
        } else if ((c & 0xF0) == 0xE0) {
            cp = c & 0x0F;
            extra = 2;
        } else if ((c & 0xF8) == 0xF0) {
            cp = c & 0x07;
            extra = 3;
        } else {
            out.push_back(c);
            ++i;
            continue;
        }
        bool ok = i + static_cast<std::size_t>(extra) < s.size();
        if (ok) {
            for (int k = 1; k <= extra; ++k) {
                const unsigned char cc = static_cast<unsigned char>(s[i + static_cast<std::size_t>(k)]);
                if ((cc & 0xC0) != 0x80) {
                    ok = false;
                    break;
                }
                cp = (cp << 6) | (cc & 0x3F);
            }
        }
        if (!ok) {
            out.push_back(c);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += static_cast<std::size_t>(extra) + 1;
    }
    return out;
}

} // namespace

PsnrResult psnr(const RgbImage& a, const RgbImage& b) {
    if (!a.same_size(b))
        throw DimensionMismatch("PSNR inputs differ in size");
    const std::uint8_t* pa = a.bytes().data();
    const std::uint8_t* pb = b.bytes().data();
    const std::size_t n = a.bytes().size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = static_cast<double>(pa[i]) - static_cast<double>(pb[i]);
        sum += d * d;
    }
    return from_mse(sum / static_cast<double>(n));
}

PsnrResult psnr(const ScalarField& a, const ScalarField& b) {
    if (!a.same_size(b))
        throw DimensionMismatch("PSNR inputs differ in size");
    const double* pa = a.values().data();
    const double* pb = b.values().data();
    const std::size_t n = a.size();
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = pa[i] - pb[i];
        sum += d * d;
    }
    return from_mse(sum / static_cast<double>(n));
}

std::size_t edit_distance(std::string_view a, std::string_view b) {
    const std::vector<char32_t> s = decode_utf8(a);
    const std::vector<char32_t> t = decode_utf8(b);
    if (s.empty()) return t.size();
    if (t.empty()) return s.size();
    std::vector<std::size_t> prev(t.size() + 1);
    std::vector<std::size_t> cur(t.size() + 1);
    for (std::size_t j = 0; j <= t.size(); ++j)
        prev[j] = j;
    for (std::size_t i = 1; i <= s.size(); ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= t.size(); ++j) {
            const std::size_t subst = prev[j - 1] + (s[i - 1] == t[j - 1] ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, subst});
        }
        std::swap(prev, cur);
    }
    return prev[t.size()];
}

std::string normalize_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool in_space = true; // leading whitespace is dropped
    for (char ch : text) {
        const bool space = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' ||
                           ch == '\f' || ch == '\v';
        if (space) {
            if (!in_space)
                out.push_back(' ');
            in_space = true;
        } else {
            out.push_back(ch);
            in_space = false;
        }
    }
    if (!out.empty() && out.back() == ' ')
        out.pop_back();
    return out;
}

} // namespace waterfill
