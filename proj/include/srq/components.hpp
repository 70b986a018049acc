#pragma once
// Connected-component labeling on a 2D binary grid. Classic two-pass
// raster scan with union-find; final ids are compacted to 1..count in
// order of first raster-scan encounter (0 = background).

#include <cstddef>
#include <cstdint>
#include <numeric>
#include <vector>

#include "srq/config.hpp"

namespace srq {

struct ComponentLabels {
    int height = 0;
    int width = 0;
    std::vector<int> labels;  // row-major, 0 = background
    int count = 0;
};

namespace detail {

class DisjointSet {
public:
    explicit DisjointSet(std::size_t n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }

    int find(int x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];  // path halving
            x = parent_[x];
        }
        return x;
    }

    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (a > b) std::swap(a, b);
        parent_[b] = a;  // keep the smaller (earlier) provisional label as root
    }

private:
    std::vector<int> parent_;
};

}  // namespace detail

inline ComponentLabels label_components(const std::vector<std::uint8_t>& mask, int height,
                                        int width, Connectivity connectivity) {
    ComponentLabels out;
    out.height = height;
    out.width = width;
    out.labels.assign(static_cast<std::size_t>(height) * static_cast<std::size_t>(width), 0);

    std::vector<int> provisional(out.labels.size(), 0);
    detail::DisjointSet dsu(out.labels.size() / 2 + 2);
    int next = 0;

    auto at = [&](int r, int c) { return static_cast<std::size_t>(r) * width + c; };

    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            if (!mask[at(r, c)]) continue;

            // Previously scanned neighbors only.
            int neighbors[4];
            int n_neighbors = 0;
            if (c > 0 && mask[at(r, c - 1)]) neighbors[n_neighbors++] = provisional[at(r, c - 1)];
            if (r > 0) {
                if (mask[at(r - 1, c)]) neighbors[n_neighbors++] = provisional[at(r - 1, c)];
                if (connectivity == Connectivity::eight) {
                    if (c > 0 && mask[at(r - 1, c - 1)])
                        neighbors[n_neighbors++] = provisional[at(r - 1, c - 1)];
                    if (c + 1 < width && mask[at(r - 1, c + 1)])
                        neighbors[n_neighbors++] = provisional[at(r - 1, c + 1)];
                }
            }

            if (n_neighbors == 0) {
                provisional[at(r, c)] = ++next;
                continue;
            }
            int chosen = neighbors[0];
            for (int i = 1; i < n_neighbors; ++i) {
                dsu.unite(chosen, neighbors[i]);
                if (neighbors[i] < chosen) chosen = neighbors[i];
            }
            provisional[at(r, c)] = chosen;
        }
    }

    // Resolve roots and compact ids by first raster-scan occurrence.
    std::vector<int> compact(static_cast<std::size_t>(next) + 1, 0);
    int count = 0;
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        if (provisional[i] == 0) continue;
        const int root = dsu.find(provisional[i]);
        if (compact[root] == 0) compact[root] = ++count;
        out.labels[i] = compact[root];
    }
    out.count = count;
    return out;
}

}  // namespace srq
