#include "flutter/modal_coefficients.hpp"

#include "flutter/errors.hpp"
#include "flutter/format.hpp"
#include "flutter/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace flutter {

using numerics::pi;

namespace {

double strip_integral(const ModeBasis& basis, const std::function<double(double)>& f) {
    return numerics::integrate_scaled(f, basis.cfg.strip_inner(), basis.cfg.half_width);
}

}  // namespace

std::pair<std::array<double, kLong>, std::array<double, kLong>> compute_ak_bk(
    const ModeBasis& basis) {
    std::array<double, kLong> a{}, b{};
    for (int k = 1; k <= kLong; ++k) {
        const ModeProfile& p = basis.mode(k);
        const double w2 = p.omega * p.omega;
        const double i2 = strip_integral(basis, [&](double y) {
            const double v = eval_profile(p, y);
            return v * v;
        });
        const double i4 = strip_integral(basis, [&](double y) {
            const double v = eval_profile(p, y);
            return v * v * v * v;
        });
        a[k - 1] = pi * i2 / w2;
        b[k - 1] = 0.75 * pi * i4 / (w2 * w2);
    }
    return {a, b};
}

std::pair<std::array<double, kTors>, std::array<std::array<double, kLong>, kTors>>
compute_abar_dlk(const ModeBasis& basis) {
    std::array<double, kTors> abar{};
    std::array<std::array<double, kLong>, kTors> d{};
    for (int l = 1; l <= kTors; ++l) {
        const ModeProfile& t = basis.mode(kLong + l);
        const double wt2 = t.omega * t.omega;
        abar[l - 1] = pi / wt2 * strip_integral(basis, [&](double y) {
                          const double v = eval_profile(t, y);
                          return v * v;
                      });
        for (int k = 1; k <= kLong; ++k) {
            const ModeProfile& p = basis.mode(k);
            const double wk2 = p.omega * p.omega;
            const double c = p.m() == t.m() ? 2.25 * pi : 1.5 * pi;
            const double i = strip_integral(basis, [&](double y) {
                const double v = eval_profile(p, y);
                const double th = eval_profile(t, y);
                return v * v * th * th;
            });
            d[l - 1][k - 1] = c * i / (wk2 * wt2);
        }
    }
    return {abar, d};
}

ModalCoefficients compute_coefficients(const ModeBasis& basis, double gamma) {
    if (!(gamma > 0.0)) throw DomainError("coefficients: gamma must be positive");
    ModalCoefficients c;
    c.gamma = gamma;
    std::tie(c.a, c.b) = compute_ak_bk(basis);
    std::tie(c.a_bar, c.d) = compute_abar_dlk(basis);
    for (int k = 1; k <= kLong; ++k) {
        c.mu[k - 1] = basis.mode(k).pair.lambda;
        c.rho[k - 1] = gamma * c.mu[k - 1] + c.a[k - 1];
    }
    for (int l = 1; l <= kTors; ++l) {
        c.nu[l - 1] = basis.mode(kLong + l).pair.lambda;
        c.delta[l - 1] = gamma * c.nu[l - 1] + c.a_bar[l - 1];
    }
    return c;
}

void validate_coefficients(const ModalCoefficients& c) {
    auto fail = [](const std::string& what) { throw DomainError("coefficients: " + what); };
    for (int k = 0; k < kLong; ++k) {
        if (!(c.a[k] > 0.0 && c.a[k] < 1.0)) fail("a_k must lie in (0, 1)");
        if (!(c.b[k] > 0.0)) fail("b_k must be positive");
        for (int l = 0; l < kTors; ++l) {
            if (!(c.d[l][k] > 0.0)) fail("d_{l,k} must be positive");
        }
    }
    for (int l = 0; l < kTors; ++l) {
        if (!(c.a_bar[l] > 0.0 && c.a_bar[l] < 1.0)) fail("a_bar_l must lie in (0, 1)");
    }
}

double sine_quartic_integral(int m1, int m2, int m3, int m4) {
    if (m1 < 1 || m2 < 1 || m3 < 1 || m4 < 1) {
        throw DomainError("sine_quartic_integral: wavenumbers must be >= 1");
    }
    // sin a sin b = (cos(a-b) - cos(a+b))/2, cos u cos v = (cos(u+v) + cos(u-v))/2,
    // and int_0^pi cos(n x) dx = pi [n = 0] for integer n.
    const int u[2] = {m1 - m2, m1 + m2};
    const int v[2] = {m3 - m4, m3 + m4};
    int count = 0;
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            const int sign = (i == j) ? 1 : -1;
            count += sign * ((u[i] + v[j] == 0) + (u[i] - v[j] == 0));
        }
    }
    return count * pi / 8.0;
}

int multiplicity(int j1, int j2, int j3) {
    if (j1 == j2 && j2 == j3) return 1;
    if (j1 == j2 || j2 == j3 || j1 == j3) return 3;
    return 6;
}

double GalerkinTensor::entry(int j1, int j2, int j3, int k) const {
    auto it = B.find(TensorKey{j1, j2, j3, k});
    return it == B.end() ? 0.0 : it->second;
}

double strip_overlap(const ModeBasis& basis, int i1, int i2, int i3, int i4) {
    const int idx[4] = {i1, i2, i3, i4};
    int torsional = 0;
    for (int i : idx) torsional += basis.is_torsional(i) ? 1 : 0;
    if (torsional % 2 == 1) return 0.0;
    const double x = sine_quartic_integral(basis.wavenumber(i1), basis.wavenumber(i2),
                                           basis.wavenumber(i3), basis.wavenumber(i4));
    if (x == 0.0) return 0.0;
    const ModeProfile* p[4] = {&basis.mode(i1), &basis.mode(i2), &basis.mode(i3),
                               &basis.mode(i4)};
    const double y = strip_integral(basis, [&](double s) {
        return eval_profile(*p[0], s) * eval_profile(*p[1], s) * eval_profile(*p[2], s) *
               eval_profile(*p[3], s);
    });
    const double norm = p[0]->omega * p[1]->omega * p[2]->omega * p[3]->omega;
    // Both strips contribute equally since the integrand is even in y.
    return x * 2.0 * y / norm;
}

GalerkinTensor compute_galerkin_tensor(const ModeBasis& basis) {
    constexpr int n = ModeBasis::kModes;
    GalerkinTensor T;
    for (int k = 1; k <= n; ++k) {
        const ModeProfile& p = basis.mode(k);
        T.A[k - 1] = pi / (p.omega * p.omega) * strip_integral(basis, [&](double y) {
                         const double v = eval_profile(p, y);
                         return v * v;
                     });
    }
    // The overlap depends only on the multiset of the four indices.
    std::map<std::array<int, 4>, double> cache;
    for (int j1 = 1; j1 <= n; ++j1) {
        for (int j2 = 1; j2 <= j1; ++j2) {
            for (int j3 = 1; j3 <= j2; ++j3) {
                for (int k = 1; k <= n; ++k) {
                    std::array<int, 4> ms{j1, j2, j3, k};
                    std::sort(ms.begin(), ms.end());
                    auto it = cache.find(ms);
                    if (it == cache.end()) {
                        it = cache.emplace(ms, strip_overlap(basis, j1, j2, j3, k)).first;
                    }
                    const double value = multiplicity(j1, j2, j3) * it->second;
                    if (std::abs(value) >= 1e-15) T.B[TensorKey{j1, j2, j3, k}] = value;
                }
            }
        }
    }
    return T;
}

bool influences(const std::vector<int>& kset, int j, const GalerkinTensor& T) {
    std::vector<int> ks = kset;
    std::sort(ks.begin(), ks.end(), std::greater<int>());
    if (std::adjacent_find(ks.begin(), ks.end()) != ks.end()) {
        throw DomainError("influences: indices must be distinct");
    }
    if (std::find(ks.begin(), ks.end(), j) != ks.end()) return false;
    switch (ks.size()) {
        case 1: return T.entry(ks[0], ks[0], ks[0], j) != 0.0;
        case 2:
            return T.entry(ks[0], ks[0], ks[1], j) != 0.0 ||
                   T.entry(ks[0], ks[1], ks[1], j) != 0.0;
        case 3: return T.entry(ks[0], ks[1], ks[2], j) != 0.0;
        default: throw DomainError("influences: kset must hold 1 to 3 indices");
    }
}

std::set<int> influence_closure(const std::set<int>& start, const GalerkinTensor& T) {
    std::set<int> cur = start;
    bool grew = true;
    while (grew) {
        grew = false;
        const std::vector<int> members(cur.begin(), cur.end());
        const int n = int(members.size());
        for (int j = 1; j <= ModeBasis::kModes; ++j) {
            if (cur.count(j)) continue;
            bool hit = false;
            for (int a = 0; a < n && !hit; ++a) {
                hit = influences({members[a]}, j, T);
                for (int b = a + 1; b < n && !hit; ++b) {
                    hit = influences({members[a], members[b]}, j, T);
                    for (int c = b + 1; c < n && !hit; ++c) {
                        hit = influences({members[a], members[b], members[c]}, j, T);
                    }
                }
            }
            if (hit) {
                cur.insert(j);
                grew = true;
            }
        }
    }
    return cur;
}

void write_tensor(std::ostream& os, const GalerkinTensor& T) {
    for (const auto& [key, value] : T.B) {
        os << key[0] << ' ' << key[1] << ' ' << key[2] << ' ' << key[3] << ' ' << fmt17(value)
           << '\n';
    }
}

GalerkinTensor read_tensor(std::istream& is, const std::array<double, ModeBasis::kModes>& A) {
    GalerkinTensor T;
    T.A = A;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        TensorKey key{};
        double value = 0.0;
        if (!(ls >> key[0] >> key[1] >> key[2] >> key[3] >> value)) {
            throw DomainError("read_tensor: malformed line " + std::to_string(lineno));
        }
        const bool sorted = key[0] >= key[1] && key[1] >= key[2];
        const bool in_range = std::all_of(key.begin(), key.end(),
                                          [](int i) { return i >= 1 && i <= ModeBasis::kModes; });
        if (!sorted || !in_range) {
            throw DomainError("read_tensor: invalid index tuple on line " +
                              std::to_string(lineno));
        }
        T.B[key] = value;
    }
    return T;
}

void write_coefficients_csv(std::ostream& os, const ModalCoefficients& c) {
    os << "k,a_k,b_k,d_1k,d_2k\n";
    for (int k = 1; k <= kLong; ++k) {
        os << k << ',' << fmt17(c.a[k - 1]) << ',' << fmt17(c.b[k - 1]) << ','
           << fmt17(c.d[0][k - 1]) << ',' << fmt17(c.d[1][k - 1]) << '\n';
    }
}

}  // namespace flutter
