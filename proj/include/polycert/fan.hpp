#ifndef POLYCERT_FAN_HPP
#define POLYCERT_FAN_HPP

#include <algorithm>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "polycert/linalg.hpp"
#include "polycert/polytope.hpp"

namespace polycert {

struct SmoothFanReport {
    bool smooth = false;
    std::optional<std::size_t> witness_cone;
};

// Simplicial fan: primitive distinct rays, maximal cones given as sorted ray
// index sets with linearly independent rays.  Cones are assumed to intersect
// pairwise in faces; that fan axiom is not re-checked here because every fan
// built by this library comes from a normal fan or a cone-fan lift, where it
// holds by construction.
class Fan {
public:
    Fan(std::size_t dim, std::vector<IntVec> rays,
        std::vector<std::vector<std::size_t>> maximal_cones)
        : dim_(dim), rays_(std::move(rays)), maximal_cones_(std::move(maximal_cones)) {
        if (dim_ == 0) throw std::invalid_argument("fan: ambient dimension is zero");
        if (rays_.empty()) throw std::invalid_argument("fan: no rays");
        for (const IntVec& r : rays_) {
            if (r.size() != dim_) throw std::invalid_argument("fan: ray of wrong dimension");
            if (is_zero(r)) throw std::invalid_argument("fan: zero ray");
            if (primitive(r) != r) throw std::invalid_argument("fan: ray is not primitive");
        }
        for (std::size_t i = 0; i < rays_.size(); ++i)
            for (std::size_t j = i + 1; j < rays_.size(); ++j)
                if (rays_[i] == rays_[j]) throw std::invalid_argument("fan: duplicate ray");
        if (maximal_cones_.empty()) throw std::invalid_argument("fan: no maximal cones");
        std::vector<bool> used(rays_.size(), false);
        for (const auto& cone : maximal_cones_) {
            if (cone.empty()) throw std::invalid_argument("fan: empty cone");
            for (std::size_t t = 0; t < cone.size(); ++t) {
                if (cone[t] >= rays_.size())
                    throw std::invalid_argument("fan: cone ray index out of range");
                if (t > 0 && cone[t] <= cone[t - 1])
                    throw std::invalid_argument("fan: cone ray indices not strictly increasing");
                used[cone[t]] = true;
            }
            if (rank(ray_matrix(cone)) != cone.size())
                throw std::invalid_argument("fan: cone rays are dependent");
        }
        for (std::size_t i = 0; i < maximal_cones_.size(); ++i)
            for (std::size_t j = 0; j < maximal_cones_.size(); ++j) {
                if (i == j) continue;
                if (std::includes(maximal_cones_[j].begin(), maximal_cones_[j].end(),
                                  maximal_cones_[i].begin(), maximal_cones_[i].end()))
                    throw std::invalid_argument("fan: maximal cone contained in another");
            }
        for (bool u : used)
            if (!u) throw std::invalid_argument("fan: unused ray");
    }

    std::size_t dim() const { return dim_; }
    const std::vector<IntVec>& rays() const { return rays_; }
    const std::vector<std::vector<std::size_t>>& maximal_cones() const { return maximal_cones_; }

    IntMat ray_matrix(const std::vector<std::size_t>& cone) const {
        IntMat A(cone.size(), dim_);
        for (std::size_t i = 0; i < cone.size(); ++i)
            for (std::size_t j = 0; j < dim_; ++j) A(i, j) = rays_[cone[i]][j];
        return A;
    }

    // A simplicial cone is smooth iff its rays extend to a Z-basis, i.e. all
    // Smith invariant factors of the ray matrix are 1.
    SmoothFanReport smooth() const {
        for (std::size_t c = 0; c < maximal_cones_.size(); ++c) {
            SnfResult s = snf(ray_matrix(maximal_cones_[c]));
            for (std::size_t i = 0; i < maximal_cones_[c].size(); ++i)
                if (s.S(i, i) != 1) return {false, c};
        }
        return {true, std::nullopt};
    }

    // Wall criterion for completeness of a simplicial fan whose cones meet in
    // faces: every maximal cone is full-dimensional and every wall (facet of a
    // maximal cone) is shared by exactly two maximal cones, so the support has
    // empty boundary.  In dimension 1 walls are empty; completeness there means
    // both ray directions are present.
    bool is_complete() const {
        if (dim_ == 1) {
            bool pos = false, neg = false;
            for (const auto& cone : maximal_cones_) {
                if (cone.size() != 1) return false;
                if (rays_[cone[0]][0] > 0) pos = true;
                if (rays_[cone[0]][0] < 0) neg = true;
            }
            return pos && neg;
        }
        std::map<std::vector<std::size_t>, std::size_t> wall_count;
        for (const auto& cone : maximal_cones_) {
            if (cone.size() != dim_) return false;
            for (std::size_t skip = 0; skip < cone.size(); ++skip) {
                std::vector<std::size_t> wall;
                for (std::size_t t = 0; t < cone.size(); ++t)
                    if (t != skip) wall.push_back(cone[t]);
                ++wall_count[wall];
            }
        }
        for (const auto& [wall, count] : wall_count)
            if (count != 2) return false;
        return true;
    }

    // Inner normal fan: one ray per facet normal, one maximal cone per vertex
    // spanned by the normals of the facets through it.  Non-simple vertices
    // yield dependent cone rays and are rejected by the constructor.
    static Fan normal_fan(const LatticePolytope& P) {
        std::vector<IntVec> rays;
        for (const Facet& f : P.facets()) rays.push_back(f.normal);
        std::vector<std::vector<std::size_t>> cones(P.vertices().size());
        for (std::size_t k = 0; k < P.facets().size(); ++k)
            for (std::size_t v : P.facets()[k].vertices) cones[v].push_back(k);
        return Fan(P.dim(), std::move(rays), std::move(cones));
    }

private:
    std::size_t dim_;
    std::vector<IntVec> rays_;
    std::vector<std::vector<std::size_t>> maximal_cones_;
};

// Fan of the total space of the rank-one cone construction over a complete
// base fan: each base ray v becomes (v, -1), a new ray (0,...,0,1) is added,
// and each base maximal cone is lifted together with the new ray.  With
// include_top the cone over all lifted base rays is added as well, closing
// the fan up (the lifted copy of the base fan's support).
inline Fan cone_fan(const Fan& base, bool include_top) {
    if (!base.is_complete())
        throw std::invalid_argument("cone fan requires complete fan");
    std::size_t m = base.rays().size();
    std::vector<IntVec> rays;
    for (const IntVec& r : base.rays()) {
        IntVec lifted = r;
        lifted.push_back(-1);
        rays.push_back(lifted);
    }
    IntVec top(base.dim() + 1, 0);
    top[base.dim()] = 1;
    rays.push_back(top);
    std::vector<std::vector<std::size_t>> cones;
    for (const auto& sigma : base.maximal_cones()) {
        std::vector<std::size_t> lifted = sigma;
        lifted.push_back(m);
        cones.push_back(lifted);
    }
    if (include_top) {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < m; ++i) all.push_back(i);
        cones.push_back(all);
    }
    return Fan(base.dim() + 1, std::move(rays), std::move(cones));
}

// Every face of a simplicial cone is the span of a ray subset, so the face
// poset of the fan is the set of all subsets of maximal cone index sets,
// grouped here by dimension (= subset size, by independence).
inline std::map<std::size_t, std::set<std::vector<std::size_t>>> cone_census(const Fan& fan) {
    std::map<std::size_t, std::set<std::vector<std::size_t>>> census;
    for (const auto& cone : fan.maximal_cones()) {
        std::size_t k = cone.size();
        for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
            std::vector<std::size_t> face;
            for (std::size_t t = 0; t < k; ++t)
                if (mask & (std::size_t(1) << t)) face.push_back(cone[t]);
            census[face.size()].insert(face);
        }
    }
    return census;
}

}  // namespace polycert

#endif
