#include "fedosov/vertical_operator.hpp"

namespace fedosov {

FormalFunction VerticalOperator::apply(const FormalFunction& f) const {
    if (frame_ != f.frame() || trunc_ != f.trunc())
        throw StructuralError("operator application frame/truncation mismatch");
    FormalFunction out(frame_, trunc_);
    for (auto& [k, slice] : slices_) {
        FormalFunction df(frame_, trunc_);
        for (auto& [key, c] : f.terms()) {
            if (!key.second.contains(k)) continue;
            df.add_term(key.first, key.second - k, c * key.second.falling(k));
        }
        if (!df.is_zero()) out += slice * df;
    }
    return out;
}

int VerticalOperator::shift_lower_bound() const {
    int s = kInfiniteOrder;
    for (auto& [k, slice] : slices_)
        s = std::min(s, slice.filtration_order() - k.degree());
    return s;
}

VerticalOperator VerticalOperator::parity_part(int parity) const {
    VerticalOperator out(frame_, trunc_, shift_);
    for (auto& [k, slice] : slices_) {
        FormalFunction part(frame_, trunc_);
        for (auto& [key, c] : slice.terms())
            if ((ext_degree(key.first) & 1) == parity) part.add_term(key.first, key.second, c);
        out.add_slice(k, part);
    }
    return out;
}

bool VerticalOperator::pure_even() const {
    for (auto& [k, slice] : slices_)
        for (auto& [key, c] : slice.terms())
            if (ext_degree(key.first) & 1) return false;
    return true;
}

VerticalOperator VerticalOperator::operator+(const VerticalOperator& o) const {
    if (frame_ != o.frame_ || trunc_ != o.trunc_)
        throw StructuralError("operator frame/truncation mismatch");
    VerticalOperator r = *this;
    r.shift_ = std::min(shift_, o.shift_);
    for (auto& [k, slice] : o.slices_) r.add_slice(k, slice);
    return r;
}

VerticalOperator VerticalOperator::operator-(const VerticalOperator& o) const {
    return *this + (-o);
}

VerticalOperator VerticalOperator::operator*(const Rational& s) const {
    VerticalOperator r(frame_, trunc_, shift_);
    if (s == 0) return r;
    for (auto& [k, slice] : slices_) r.add_slice(k, slice * s);
    return r;
}

std::string VerticalOperator::str() const {
    if (slices_.empty()) return "0";
    std::string s;
    for (auto& [k, slice] : slices_) {
        if (!s.empty()) s += " ; ";
        s += "[" + slice.str() + "] d" + k.str();
    }
    return s;
}

VerticalOperator decompose(const Frame& frame, int trunc, int declared_shift,
                           const std::function<FormalFunction(const MultiIndex&)>& values) {
    VerticalOperator op(frame, trunc, declared_shift);
    for (int d = 0; d <= trunc; ++d) {
        for_each_of_degree(frame.r, d, [&](const MultiIndex& k) {
            FormalFunction g = values(k);
            for (auto& [kp, slice] : op.slices()) {
                if (!k.contains(kp)) continue;
                FormalFunction mono = FormalFunction::monomial(
                    frame, trunc, 0, k - kp, frame.cconst(k.falling(kp)));
                g -= slice * mono;
            }
            if (g.is_zero()) return;
            FormalFunction sliced = g * (Rational(1) / k.fact());
            if (sliced.filtration_order() - d < declared_shift)
                throw StructuralError("shift violation in decomposition at eta^" + k.str() +
                                      ": " + sliced.str());
            op.add_slice(k, sliced);
        });
    }
    return op;
}

VerticalOperator delta_op(const VerticalOperator& op) {
    VerticalOperator out(op.frame(), op.trunc(), op.declared_shift() - 1);
    for (auto& [k, slice] : op.slices()) out.add_slice(k, koszul(slice));
    return out;
}

VerticalOperator h_op(const VerticalOperator& op, const Contraction& ctx) {
    VerticalOperator out(op.frame(), op.trunc(), op.declared_shift() + 1);
    for (auto& [k, slice] : op.slices()) out.add_slice(k, ctx.h(slice));
    return out;
}

VerticalOperator sigma0_op(const VerticalOperator& op, const Contraction& ctx) {
    VerticalOperator out(op.frame(), op.trunc(), op.declared_shift());
    for (auto& [k, slice] : op.slices()) out.add_slice(k, ctx.sigma0(slice));
    return out;
}

VerticalOperator eth(const VerticalOperator& phi, const BForm& dq, const FedosovField& q2) {
    const Frame& fr = phi.frame();
    int trunc = phi.trunc();
    if (phi.shift_lower_bound() < 0)
        throw StructuralError("eth expects a non-negative filtration shift");
    VerticalOperator even = phi.parity_part(0);
    VerticalOperator odd = phi.parity_part(1);
    auto values = [&](const MultiIndex& k) {
        FormalFunction gen = FormalFunction::eta_monomial(fr, trunc, k);
        FormalFunction pf = phi.apply(gen);
        FormalFunction tail_gen = q2.apply_tail(gen);
        return apply_field(dq, pf) + q2.apply_tail(pf) - even.apply(tail_gen) +
               odd.apply(tail_gen);
    };
    return decompose(fr, trunc, std::max(phi.declared_shift(), 0), values);
}

VerticalOperator solve_phi(const FedosovField& q1, const FedosovField& q2,
                           const Contraction& hctx) {
    const Frame& fr = q1.presentation().frame();
    int trunc = q1.trunc();
    BForm dq = delta_q(q1, q2);
    VerticalOperator one = VerticalOperator::identity(fr, trunc);
    VerticalOperator phi = one;
    bool converged = false;
    for (int sweep = 0; sweep <= trunc + 2; ++sweep) {
        VerticalOperator next = one + h_op(eth(phi, dq, q2), hctx);
        if (next == phi) {
            converged = true;
            break;
        }
        phi = next;
    }
    if (!converged)
        throw StructuralError("intertwiner iteration failed to stabilize");
    IntertwinerReport rep = check_intertwining(phi, q1, q2);
    if (!rep.ok)
        throw StructuralError("intertwining residual: " + rep.witness);
    return phi;
}

IntertwinerReport check_intertwining(const VerticalOperator& phi, const FedosovField& q1,
                                     const FedosovField& q2) {
    IntertwinerReport rep;
    const Frame& fr = phi.frame();
    int trunc = phi.trunc();
    int limit = trunc - 1;
    for (ExtMask m = 0; m < (ExtMask(1) << fr.rank_total()) && rep.ok; ++m) {
        for_each_up_to_degree(fr.r, limit, [&](const MultiIndex& j) {
            if (!rep.ok) return;
            FormalFunction f = FormalFunction::monomial(fr, trunc, m, j, fr.cconst(1));
            FormalFunction res =
                (phi.apply(q2.apply(f)) - q1.apply(phi.apply(f))).truncated(limit);
            if (!res.is_zero()) {
                rep.ok = false;
                rep.witness = "on " + f.str() + ": " + res.str();
            }
        });
    }
    return rep;
}

VerticalOperator exp_field(const BForm& y, int trunc) {
    const Frame& fr = y.frame();
    if (y.max_form_degree() != 0)
        throw StructuralError("flow argument must have exterior degree zero");
    if (!y.is_zero() && y.filtration_order() < 2)
        throw StructuralError("flow argument must have fiber order at least two");
    auto values = [&](const MultiIndex& k) {
        FormalFunction gen = FormalFunction::eta_monomial(fr, trunc, k);
        FormalFunction sum = gen;
        FormalFunction power = gen;
        Rational fact = 1;
        for (int n = 1; n <= trunc; ++n) {
            power = apply_field(y, power);
            if (power.is_zero()) break;
            fact *= n;
            sum += power * (Rational(1) / fact);
        }
        return sum;
    };
    return decompose(fr, trunc, 0, values);
}

namespace {

void require_automorphism_components(const VerticalOperator& phi) {
    const Frame& fr = phi.frame();
    int trunc = phi.trunc();
    if (!phi.pure_even())
        throw StructuralError("logarithm input must have exterior degree zero");
    for_each_up_to_degree(fr.r, trunc, [&](const MultiIndex& k) {
        FormalFunction gen = FormalFunction::eta_monomial(fr, phi.trunc(), k);
        FormalFunction diff = phi.apply(gen) - gen;
        if (!diff.is_zero() && diff.filtration_order() <= k.degree())
            throw StructuralError(
                "logarithm input is not unitriangular: factor out the linear component at eta^" +
                k.str());
    });
}

} // namespace

BForm log_operator(const VerticalOperator& phi) {
    const Frame& fr = phi.frame();
    int trunc = phi.trunc();
    require_automorphism_components(phi);

    // backend one: degreewise recursion on the generator components
    std::vector<FormalFunction> f_j;
    for (int j = 1; j <= fr.r; ++j)
        f_j.push_back(phi.apply(
            FormalFunction::eta_monomial(fr, trunc, MultiIndex::unit(fr.r, j - 1))));

    std::vector<BForm> y_parts(trunc + 1, BForm::zero(fr, trunc));
    for (int q = 2; q <= trunc; ++q) {
        BForm yq(fr, trunc);
        for (int j = 1; j <= fr.r; ++j) yq.comp(j) = f_j[j - 1].symmetric_part(q);
        // subtract the k-fold compositions of the known lower parts
        for (int k = 2; k <= q - 1; ++k) {
            Rational weight = Rational(1) / factorial(k);
            std::vector<int> comp(k, 2);
            std::function<void(int, int)> enumerate = [&](int pos, int rest) {
                if (pos == k) {
                    if (rest != 0) return;
                    for (int j = 1; j <= fr.r; ++j) {
                        FormalFunction g = FormalFunction::eta_monomial(
                            fr, trunc, MultiIndex::unit(fr.r, j - 1));
                        for (int m = k - 1; m >= 0; --m) g = apply_field(y_parts[comp[m]], g);
                        yq.comp(j) -= g * weight;
                    }
                    return;
                }
                for (int v = 2; v <= rest - 2 * (k - pos - 1); ++v) {
                    comp[pos] = v;
                    enumerate(pos + 1, rest - v);
                }
            };
            enumerate(0, q - 1 + k);
        }
        y_parts[q] = yq;
    }
    BForm y_rec(fr, trunc);
    for (int q = 2; q <= trunc; ++q) y_rec += y_parts[q];

    // backend two: operator logarithm series of phi - 1
    BForm y_log(fr, trunc);
    for (int j = 1; j <= fr.r; ++j) {
        FormalFunction gen = FormalFunction::eta_monomial(fr, trunc, MultiIndex::unit(fr.r, j - 1));
        FormalFunction power = gen;
        FormalFunction acc(fr, trunc);
        for (int k = 1; k <= trunc; ++k) {
            power = phi.apply(power) - power;
            if (power.is_zero()) break;
            acc += power * rat((k & 1) ? 1 : -1, k);
        }
        y_log.comp(j) = acc;
    }

    if (y_rec != y_log)
        throw StructuralError("logarithm backends disagree: " + (y_rec - y_log).str());
    return y_rec;
}

VerticalOperator dual_of_coalgebra_map(
    const Frame& frame, int trunc,
    const std::function<PolySection(const MultiIndex&)>& psi) {
    // phi(eta^J) = sum_K (J!/K!) [psi(d_K)]_J eta^K
    std::map<MultiIndex, FormalFunction> values;
    for_each_up_to_degree(frame.r, trunc, [&](const MultiIndex& j) {
        values.emplace(j, FormalFunction::zero(frame, trunc));
    });
    for_each_up_to_degree(frame.r, trunc, [&](const MultiIndex& k) {
        PolySection image = psi(k);
        if (image.max_degree() > k.degree())
            throw StructuralError("coalgebra map is not filtered at d" + k.str());
        if (image.degree_part(k.degree()) != PolySection::basis(frame, k))
            throw StructuralError("coalgebra map is not unitriangular at d" + k.str());
        for (auto& [j, c] : image.terms()) {
            auto it = values.find(j);
            if (it == values.end()) continue;
            it->second.add_term(0, k, c * (j.fact() / k.fact()));
        }
    });
    return decompose(frame, trunc, 0,
                     [&](const MultiIndex& j) { return values.at(j); });
}

void PolyDiffTensor::add(const std::vector<MultiIndex>& key, const FormalFunction& c) {
    if (c.is_zero()) return;
    auto it = terms.find(key);
    if (it == terms.end()) {
        terms.emplace(key, c);
    } else {
        it->second += c;
        if (it->second.is_zero()) terms.erase(it);
    }
}

int PolyDiffTensor::filtration_order() const {
    int ord = kInfiniteOrder;
    for (auto& [k, c] : terms) ord = std::min(ord, c.filtration_order());
    return ord;
}

PolyDiffTensor pushforward_polydiff(const VerticalOperator& phi,
                                    const VerticalOperator& phi_inverse,
                                    const PolyDiffOp& p) {
    const Frame& fr = phi.frame();
    int trunc = phi.trunc();
    int legs = static_cast<int>(p.legs.size());

    // each differentiation order eats one degree of validity at truncation
    int weight = 0;
    for (auto& j : p.legs) weight += j.degree();
    int horizon = trunc - weight;
    if (horizon < 0)
        throw StructuralError("pushforward legs exceed the truncation order");

    auto evaluate = [&](const std::vector<MultiIndex>& args) {
        FormalFunction g = FormalFunction::eta_monomial(fr, trunc, p.eta_power);
        for (int leg = 0; leg < legs; ++leg) {
            FormalFunction h = phi_inverse.apply(
                FormalFunction::eta_monomial(fr, trunc, args[leg]));
            for (int i = 1; i <= fr.r; ++i)
                for (int rep = 0; rep < p.legs[leg][i - 1]; ++rep) h = h.eta_partial(i);
            g = g * h;
        }
        return phi.apply(g).truncated(horizon);
    };

    // derivative order of a conjugated leg never exceeds the original order
    PolyDiffTensor out{fr, horizon, {}};
    std::vector<std::vector<MultiIndex>> arg_lists(legs);
    for (int leg = 0; leg < legs; ++leg)
        for_each_up_to_degree(fr.r, p.legs[leg].degree(),
                              [&](const MultiIndex& m) { arg_lists[leg].push_back(m); });

    std::vector<std::vector<MultiIndex>> tuples;
    std::vector<MultiIndex> cur(legs, MultiIndex(fr.r));
    std::function<void(int)> build = [&](int pos) {
        if (pos == legs) {
            tuples.push_back(cur);
            return;
        }
        for (auto& m : arg_lists[pos]) {
            cur[pos] = m;
            build(pos + 1);
        }
    };
    build(0);
    std::sort(tuples.begin(), tuples.end(),
              [](const std::vector<MultiIndex>& a, const std::vector<MultiIndex>& b) {
                  int da = 0, db = 0;
                  for (auto& m : a) da += m.degree();
                  for (auto& m : b) db += m.degree();
                  if (da != db) return da < db;
                  return a < b;
              });

    for (auto& m : tuples) {
        FormalFunction value = evaluate(m);
        for (auto& [k, c] : out.terms) {
            bool dominated = true;
            Rational fall = 1;
            MultiIndex total(fr.r);
            for (int leg = 0; leg < legs && dominated; ++leg) {
                if (!m[leg].contains(k[leg])) dominated = false;
                else {
                    fall *= m[leg].falling(k[leg]);
                    total = total + (m[leg] - k[leg]);
                }
            }
            if (!dominated) continue;
            value -=
                (c * FormalFunction::monomial(fr, trunc, 0, total, fr.cconst(fall)))
                    .truncated(horizon);
        }
        Rational norm = 1;
        for (int leg = 0; leg < legs; ++leg) norm *= m[leg].fact();
        out.add(m, value * (Rational(1) / norm));
    }
    return out;
}

PolyDiffTensor pushforward_leading_term(const VerticalOperator& phi_inverse,
                                        const PolyDiffOp& p) {
    const Frame& fr = phi_inverse.frame();
    int trunc = phi_inverse.trunc();
    int legs = static_cast<int>(p.legs.size());
    int weight = 0;
    for (auto& j : p.legs) weight += j.degree();
    int horizon = trunc - weight;
    if (horizon < 0)
        throw StructuralError("pushforward legs exceed the truncation order");

    // psi^{-1}(d_J) through the pairing transpose of the inverse flow; the
    // unitriangularity keeps the degree at most |J|
    auto psi_inv = [&](const MultiIndex& j) {
        PolySection out(fr);
        for_each_up_to_degree(fr.r, j.degree(), [&](const MultiIndex& k) {
            FormalFunction im = phi_inverse.apply(FormalFunction::eta_monomial(fr, trunc, k));
            Coefficient c = im.fiber_coefficient(j);
            if (!c.is_zero()) out.add_term(k, c * (j.fact() / k.fact()));
        });
        return out;
    };

    PolyDiffTensor out{fr, horizon, {}};
    std::vector<PolySection> leg_images;
    for (int leg = 0; leg < legs; ++leg) leg_images.push_back(psi_inv(p.legs[leg]));

    std::vector<MultiIndex> key(legs, MultiIndex(fr.r));
    FormalFunction head = FormalFunction::eta_monomial(fr, trunc, p.eta_power);
    std::function<void(int, const Coefficient&)> walk = [&](int pos, const Coefficient& c) {
        if (pos == legs) {
            out.add(key, (head * c).truncated(horizon));
            return;
        }
        for (auto& [k, ck] : leg_images[pos].terms()) {
            key[pos] = k;
            walk(pos + 1, c * ck);
        }
    };
    walk(0, fr.cconst(1));
    return out;
}

} // namespace fedosov
