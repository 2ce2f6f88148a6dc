#include "ccq/spaces.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

namespace ccq {

namespace {

void cuts_rec(std::size_t n, int k, int j, std::size_t lo, std::vector<std::size_t>& cuts,
              std::vector<Label>& flat) {
    if (j == k - 1) {
        for (std::size_t i = 0; i < n; ++i) {
            int y = 1;
            for (std::size_t c : cuts) y += c <= i;
            flat.push_back(static_cast<Label>(y));
        }
        return;
    }
    for (std::size_t c = lo; c <= n; ++c) {
        cuts[j] = c;
        cuts_rec(n, k, j + 1, c, cuts, flat);
    }
}

void check_k(int k) {
    if (k < 2 || k > kMaxLabels) throw Error("k must be in [2, 255]");
}

}  // namespace

SpaceBundle thresholds(std::size_t n, int k) {
    check_k(k);
    if (n == 0) throw Error("thresholds need a grid of at least one point");
    // count = C(n + k - 1, k - 1)
    double count = 1.0;
    for (int j = 1; j < k; ++j) count = count * static_cast<double>(n + j) / j;
    if (count > 5e6) throw Error("thresholds space too large");
    std::vector<Label> flat;
    flat.reserve(static_cast<std::size_t>(count) * n);
    std::vector<std::size_t> cuts(static_cast<std::size_t>(k - 1));
    cuts_rec(n, k, 0, 0, cuts, flat);
    return {Domain::uniform(n), HypothesisSpace(k, n, std::move(flat), k - 1)};
}

SpaceBundle intervals(std::size_t n, int k) {
    check_k(k);
    if (n == 0) throw Error("intervals need a grid of at least one point");
    const double count = static_cast<double>(k - 1) * static_cast<double>(n) * static_cast<double>(n + 1) / 2.0 + 1.0;
    if (count * static_cast<double>(n) > 4e9) throw Error("intervals space too large");
    std::vector<Label> flat;
    flat.reserve(static_cast<std::size_t>(count) * n);
    flat.insert(flat.end(), n, Label{1});
    for (int c = 2; c <= k; ++c) {
        for (std::size_t a = 0; a < n; ++a) {
            for (std::size_t b = a; b < n; ++b) {
                for (std::size_t i = 0; i < n; ++i) flat.push_back(i >= a && i <= b ? static_cast<Label>(c) : Label{1});
            }
        }
    }
    return {Domain::uniform(n), HypothesisSpace(k, n, std::move(flat), 2)};
}

SpaceBundle shattered(std::size_t d, int k) {
    check_k(k);
    if (d == 0) throw Error("shattered space needs d >= 1");
    const double count = std::pow(static_cast<double>(k), static_cast<double>(d));
    if (count > static_cast<double>(1u << 22)) throw Error("shattered space too large");
    const std::size_t m = static_cast<std::size_t>(count);
    std::vector<Label> flat(m * d);
    for (std::size_t r = 0; r < m; ++r) {
        std::size_t v = r;
        for (std::size_t i = 0; i < d; ++i) {
            flat[r * d + i] = static_cast<Label>(1 + v % static_cast<std::size_t>(k));
            v /= static_cast<std::size_t>(k);
        }
    }
    return {Domain::uniform(d), HypothesisSpace(k, d, std::move(flat), static_cast<int>(d))};
}

SpaceBundle explicit_space(int k, const std::vector<Hypothesis>& hs, std::vector<double> weights) {
    if (hs.empty()) throw Error("explicit space needs at least one hypothesis");
    HypothesisSpace space(k, hs);
    Domain dom = weights.empty() ? Domain::uniform(space.domain_size()) : Domain(std::move(weights));
    check_same_domain(space, dom);
    return {std::move(dom), std::move(space)};
}

namespace {

std::size_t parse_size(std::string_view s, const std::string& what) {
    std::size_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) throw Error("bad " + what + ": '" + std::string(s) + "'");
    return v;
}

}  // namespace

SpaceBundle parse_space_spec(const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw Error("space spec must look like kind:params, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string rest = spec.substr(colon + 1);
    if (kind == "file") {
        std::ifstream in(rest);
        if (!in) throw Error("cannot open space file '" + rest + "'");
        return read_space(in);
    }
    std::vector<std::string> parts;
    std::stringstream ss(rest);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.empty() || parts.size() > 2) throw Error("bad space spec '" + spec + "'");
    const std::size_t a = parse_size(parts[0], "space size");
    const int k = parts.size() == 2 ? static_cast<int>(parse_size(parts[1], "label count")) : 2;
    if (kind == "thresholds") return thresholds(a, k);
    if (kind == "intervals") return intervals(a, k);
    if (kind == "shattered") return shattered(a, k);
    throw Error("unknown space kind '" + kind + "'");
}

void write_space(std::ostream& os, const Domain& dom, const HypothesisSpace& space) {
    check_same_domain(space, dom);
    os << "k=" << space.k() << " n=" << dom.size() << '\n';
    os << std::setprecision(17);
    for (std::size_t x = 0; x < dom.size(); ++x) os << (x ? " " : "") << dom.weight(x);
    os << '\n';
    for (std::size_t i = 0; i < space.size(); ++i) {
        auto r = space.row(i);
        for (std::size_t x = 0; x < r.size(); ++x) os << (x ? " " : "") << static_cast<int>(r[x]);
        os << '\n';
    }
}

SpaceBundle read_space(std::istream& is) {
    std::string line;
    auto next_line = [&]() -> bool {
        while (std::getline(is, line)) {
            const auto p = line.find_first_not_of(" \t\r");
            if (p == std::string::npos || line[p] == '#') continue;
            return true;
        }
        return false;
    };
    if (!next_line()) throw Error("space file: missing header");
    int k = 0;
    long long n = 0;
    {
        std::istringstream hs(line);
        std::string a, b;
        hs >> a >> b;
        if (a.rfind("k=", 0) != 0 || b.rfind("n=", 0) != 0) throw Error("space file: header must be 'k=<int> n=<int>'");
        k = static_cast<int>(parse_size(a.substr(2), "k"));
        n = static_cast<long long>(parse_size(b.substr(2), "n"));
    }
    if (n <= 0) throw Error("space file: n must be positive");
    if (!next_line()) throw Error("space file: missing weights row");
    std::vector<double> w;
    {
        std::istringstream ws(line);
        for (double v; ws >> v;) w.push_back(v);
        if (static_cast<long long>(w.size()) != n) throw Error("space file: weights row must have n entries");
    }
    std::vector<Label> flat;
    while (next_line()) {
        std::istringstream rs(line);
        long long cnt = 0;
        for (int v; rs >> v; ++cnt) {
            if (v < 1 || v > k) throw Error("space file: label out of range");
            flat.push_back(static_cast<Label>(v));
        }
        if (!rs.eof()) throw Error("space file: non-integer label");
        if (cnt != n) throw Error("space file: label row must have n entries");
    }
    Domain dom(std::move(w));
    HypothesisSpace space(k, static_cast<std::size_t>(n), std::move(flat));
    return {std::move(dom), std::move(space)};
}

}  // namespace ccq
