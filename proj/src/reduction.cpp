#include "allen_cahn/reduction.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace ac {

ScalarField TubeGrid::to_manifold(const Eigen::VectorXd& w, int manifold_size) const {
    if (w.size() != size()) throw rejected("tube field size mismatch");
    ScalarField out = ScalarField::Zero(manifold_size);
    for (int i = 0; i < size(); ++i) out[nodes[i]] = w[i];
    return out;
}

Eigen::VectorXd TubeGrid::from_manifold(const ScalarField& f) const {
    Eigen::VectorXd out(size());
    for (int i = 0; i < size(); ++i) out[i] = f[nodes[i]];
    return out;
}

double TubeGrid::profile_at(double t) const {
    int first;
    double w[4];
    cubic_weights((t - layout.t0) / layout.dt, first, w);
    double v = 0.0;
    for (int m = 0; m < 4; ++m) {
        const int k = first + m;
        if (k >= 0 && k < layout.n_t) v += w[m] * kernel_profile[k];
    }
    return v;
}

TubeGrid tube_grid(const ManifoldGrid& g, const InterfaceGeometry& geo, const Heteroclinic& h, const CutoffFamily& cut) {
    const double eps = cut.eps;
    const double dz = geo.column_dz();
    if (dz > 0.25 * eps * (1.0 + 1e-12))
        throw rejected("tube grid: eps must be at least four node spacings along the normal");
    TubeGrid tg;
    tg.reach = 1.02 * cut.scale;
    const int ncol = static_cast<int>(geo.column(0).size());
    int first = -1, last = -1;
    for (int m = 0; m < ncol; ++m) {
        const double z = geo.column_z0() + m * dz;
        if (std::abs(z) <= tg.reach * (1.0 + 1e-12)) {
            if (first < 0) first = m;
            last = m;
        }
    }
    if (first < 2 || last + 2 >= ncol) throw rejected("tube grid: Fermi chart too narrow for the tube");
    tg.offset = first;
    tg.layout.n_gamma = geo.gamma_size();
    tg.layout.n_t = last - first + 1;
    tg.layout.t0 = geo.column_z0() + first * dz;
    tg.layout.dt = dz;
    const int nt = tg.layout.n_t;
    tg.nodes.resize(tg.layout.size());
    for (int y = 0; y < tg.layout.n_gamma; ++y)
        for (int k = 0; k < nt; ++k) tg.nodes[tg.layout.at(y, k)] = geo.column(y)[first + k];

    tg.profile.resize(nt);
    tg.slope.resize(nt);
    Eigen::VectorXd diag(nt), sub = Eigen::VectorXd::Constant(nt - 1, eps * eps / (dz * dz));
    for (int k = 0; k < nt; ++k) {
        const auto p = h.at(tg.layout.t(k) / eps);
        tg.profile[k] = p.value;
        tg.slope[k] = p.slope;
        diag[k] = -2.0 * eps * eps / (dz * dz) - h.potential().d2(p.value);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    es.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    tg.kernel_eigenvalue = es.eigenvalues()[nt - 1];
    Eigen::VectorXd v = es.eigenvectors().col(nt - 1);
    tg.kernel_profile = (v.dot(tg.slope) / v.squaredNorm()) * v;
    (void)g;
    return tg;
}

SurfaceField project_pi(const TubeGrid& tg, const Eigen::VectorXd& w) {
    const auto& l = tg.layout;
    if (w.size() != l.size()) throw rejected("project_pi: tube field size mismatch");
    const double norm = tg.kernel_profile.squaredNorm();
    SurfaceField out(l.n_gamma);
    for (int y = 0; y < l.n_gamma; ++y) out[y] = w.segment(y * l.n_t, l.n_t).dot(tg.kernel_profile) / norm;
    return out;
}

Eigen::VectorXd lift(const TubeGrid& tg, const SurfaceField& a) {
    const auto& l = tg.layout;
    Eigen::VectorXd out(l.size());
    for (int y = 0; y < l.n_gamma; ++y) out.segment(y * l.n_t, l.n_t) = a[y] * tg.kernel_profile;
    return out;
}

Eigen::VectorXd project_perp(const TubeGrid& tg, const Eigen::VectorXd& w) { return w - lift(tg, project_pi(tg, w)); }

double orthogonality_defect(const TubeGrid& tg, const Eigen::VectorXd& w) {
    const auto& l = tg.layout;
    double worst = 0.0;
    for (int y = 0; y < l.n_gamma; ++y)
        worst = std::max(worst, std::abs(w.segment(y * l.n_t, l.n_t).dot(tg.kernel_profile) * l.dt));
    return worst;
}

LinearOperators::LinearOperators(const ManifoldGrid& g, const InterfaceGeometry& geo, const TubeGrid& tg,
                                 const DoubleWell& w, double eps)
    : g_(&g), tg_(&tg), eps_(eps), well_curvature_(w.d2(w.well)) {
    const auto& lay = tg.layout;
    const int n = lay.size(), ng = lay.n_gamma, nt = lay.n_t;
    const double e2 = eps * eps, c = e2 / (lay.dt * lay.dt);
    const Eigen::MatrixXd& kg = geo.gamma_stiffness();
    const Eigen::VectorXd& wg = geo.gamma_weights();
    std::vector<Eigen::Triplet<double>> t;
    for (int y = 0; y < ng; ++y)
        for (int k = 0; k < nt; ++k) {
            const int r = lay.at(y, k);
            t.emplace_back(r, r, -2.0 * c - w.d2(tg.profile[k]));
            if (k > 0) t.emplace_back(r, lay.at(y, k - 1), c);
            if (k + 1 < nt) t.emplace_back(r, lay.at(y, k + 1), c);
            for (int q = 0; q < ng; ++q)
                if (kg(y, q) != 0.0) t.emplace_back(r, lay.at(q, k), e2 * kg(y, q) / wg[y]);
        }
    l_.resize(n, n);
    l_.setFromTriplets(t.begin(), t.end());
    l_.makeCompressed();

    for (int y = 0; y < ng; ++y)
        for (int k = 0; k < nt; ++k) {
            t.emplace_back(lay.at(y, k), n + y, tg.kernel_profile[k]);
            t.emplace_back(n + y, lay.at(y, k), tg.kernel_profile[k]);
        }
    SparseMatrix s(n + ng, n + ng);
    s.setFromTriplets(t.begin(), t.end());
    s.makeCompressed();
    saddle_ = std::make_shared<Eigen::SparseLU<SparseMatrix>>();
    saddle_->analyzePattern(s);
    saddle_->factorize(s);
    if (saddle_->info() != Eigen::Success) throw rejected("tube operator: factorization failed");

    SparseMatrix a = -e2 * g.stiffness();
    for (int i = 0; i < g.size(); ++i) a.coeffRef(i, i) += well_curvature_ * g.weights()[i];
    a.makeCompressed();
    well_ = std::make_shared<Eigen::SimplicialLLT<SparseMatrix>>(a);
    if (well_->info() != Eigen::Success) throw rejected("well operator: factorization failed");
}

Eigen::VectorXd LinearOperators::apply_L(const Eigen::VectorXd& v) const { return l_ * v; }

Eigen::VectorXd LinearOperators::solve_L(const Eigen::VectorXd& f) const {
    const int n = tg_->size();
    if (f.size() != n) throw rejected("solve_L: tube field size mismatch");
    const double fn = f.size() ? f.cwiseAbs().maxCoeff() : 0.0;
    if (project_pi(*tg_, f).cwiseAbs().maxCoeff() > 1e-8 * std::max(1.0, fn))
        throw rejected("solve_L: right-hand side is not orthogonal to the kernel profile");
    if (fn == 0.0) return Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + tg_->layout.n_gamma);
    rhs.head(n) = f;
    Eigen::VectorXd x = saddle_->solve(rhs);
    // one refinement step against the full saddle system
    Eigen::VectorXd r = rhs;
    r.head(n) -= l_ * x.head(n) + lift(*tg_, x.tail(tg_->layout.n_gamma));
    for (int y = 0; y < tg_->layout.n_gamma; ++y)
        r[n + y] -= x.segment(y * tg_->layout.n_t, tg_->layout.n_t).dot(tg_->kernel_profile);
    x += saddle_->solve(r);
    Eigen::VectorXd w = x.head(n);
    const double res = (l_ * w - f).norm();
    if (!(res <= 1e-9 * f.norm())) throw rejected("solve_L: linear solve stagnated");
    return w;
}

ScalarField LinearOperators::apply_well(const ScalarField& v) const {
    return eps_ * eps_ * g_->laplacian(v) - well_curvature_ * v;
}

ScalarField LinearOperators::solve_well(const ScalarField& f) const {
    if (f.size() != g_->size()) throw rejected("solve_well: field size mismatch");
    const Eigen::VectorXd rhs = -g_->weights().cwiseProduct(f);
    ScalarField w = well_->solve(rhs);
    const SparseMatrix& k = g_->stiffness();
    // refinement in the weighted form
    const Eigen::VectorXd r = rhs - (well_curvature_ * g_->weights().cwiseProduct(w) - eps_ * eps_ * (k * w));
    w += well_->solve(r);
    return w;
}

Reduction::Reduction(const ManifoldGrid& g, const InterfaceGeometry& geo, const JacobiSystem& js, const Heteroclinic& h,
                     double eps, double delta_star)
    : g_(&g), geo_(&geo), js_(&js), h_(&h), eps_(eps), cut_(cutoffs(eps, delta_star, geo.tau())) {
    if (geo.manifold_size() != g.size()) throw rejected("reduction: interface and grid do not match");
    tube_ = tube_grid(g, geo, h, cut_);
    ops_ = std::make_shared<LinearOperators>(g, geo, tube_, h.potential(), eps);
    base_ = approximate_solution(geo, h, eps, cut_);
    for (int k = 1; k <= 5; ++k) cut_fields_.push_back(cutoff_field(geo, cut_, k));
    plateau4_ = (cut_fields_[3].array() == 1.0).cast<double>().matrix();

    // The shift profile of the graph map changes over less than a grid cell, which adds a nearly
    // uniform multiple of displacement to the projected equation. Measure it on the softest non-null Jacobi mode.
    int probe = -1;
    for (int i = 0; i < js.eigenvalues.size(); ++i)
        if (std::abs(js.eigenvalues[i]) > js.threshold &&
            (probe < 0 || std::abs(js.eigenvalues[i]) < std::abs(js.eigenvalues[probe])))
            probe = i;
    if (probe >= 0) {
        const SurfaceField v = js.eigenvectors.col(probe);
        const double delta = 1e-6 / v.cwiseAbs().maxCoeff();
        ReducedState shifted = zero_state();
        shifted.displacement = delta * v;
        const SurfaceField df = project_pi(tube_, assemble(zero_state()).m - assemble(shifted).m) / eps_;
        displacement_gain_ = js.dot(df, v) / delta;
    }
}

ReducedState Reduction::zero_state() const {
    ReducedState s;
    s.v_outer = ScalarField::Zero(g_->size());
    s.v_tube = Eigen::VectorXd::Zero(tube_.size());
    s.displacement = SurfaceField::Zero(geo_->gamma_size());
    s.c = Eigen::VectorXd::Zero(js_->nullity);
    return s;
}

Reduction::Pieces Reduction::assemble(const ReducedState& s) const {
    const DoubleWell& w = h_->potential();
    const double e2 = eps_ * eps_, wcurv = w.d2(w.well);
    const int n = g_->size();
    const GraphDiffeo d(*geo_, cut_, s.displacement);
    const ScalarField& cut3 = cut_fields_[2];
    const ScalarField& cut4 = cut_fields_[3];
    const ScalarField vbar = tube_.to_manifold(s.v_tube, n);
    const ScalarField cut_vbar = cut4.cwiseProduct(vbar);
    const ScalarField v = cut_vbar + s.v_outer;

    const ScalarField p = transported_operator(*g_, d, w, eps_, base_);
    const ScalarField q = quadratic_remainder(w, base_, v);
    ScalarField b = e2 * (conjugated_laplacian(*g_, d, s.v_outer) - g_->laplacian(s.v_outer)) + p - q;
    for (int i = 0; i < n; ++i) b[i] -= (w.d2(base_[i]) - wcurv) * s.v_outer[i];
    const ScalarField lap_vbar = conjugated_laplacian(*g_, d, vbar);
    const ScalarField c = e2 * (conjugated_laplacian(*g_, d, cut_vbar) - cut4.cwiseProduct(lap_vbar));

    Pieces out;
    out.n = ScalarField::Zero(n);
    for (int i = 0; i < n; ++i)
        if (plateau4_[i] == 0.0) out.n[i] = (cut4[i] - 1.0) * b[i] - c[i];

    const SurfaceField jz = js_->apply(s.displacement);
    const Eigen::VectorXd lv = ops_->apply_L(s.v_tube);
    const auto& lay = tube_.layout;
    out.m = Eigen::VectorXd::Zero(lay.size());
    for (int y = 0; y < lay.n_gamma; ++y)
        for (int k = 0; k < lay.n_t; ++k) {
            const int i = lay.at(y, k), node = tube_.nodes[i];
            if (cut3[node] == 0.0) continue;
            const double bracket = lv[i] - e2 * lap_vbar[node] + w.d2(base_[node]) * s.v_tube[i] - b[node] -
                                   plateau4_[node] * c[node] - eps_ * jz[y] * tube_.kernel_profile[k];
            out.m[i] = cut3[node] * bracket;
        }
    return out;
}

ScalarField Reduction::outer_source(const ReducedState& s) const { return assemble(s).n; }
Eigen::VectorXd Reduction::tube_source(const ReducedState& s) const { return assemble(s).m; }

ReducedState Reduction::step(const ReducedState& s) const {
    const Pieces p = assemble(s);
    ReducedState out;
    out.v_outer = ops_->solve_well(p.n);
    out.v_tube = ops_->solve_L(project_perp(tube_, p.m));
    const SurfaceField f = -project_pi(tube_, p.m) / eps_;
    const ProjectedSolution sol = solve_jacobi_projected(*js_, f - displacement_gain_ * s.displacement, displacement_gain_);
    out.displacement = sol.displacement;
    out.c = sol.c;
    return out;
}

ScalarField Reduction::solution(const ReducedState& s) const {
    const GraphDiffeo d(*geo_, cut_, s.displacement);
    const ScalarField vbar = tube_.to_manifold(s.v_tube, g_->size());
    return d.pull(base_ + cut_fields_[3].cwiseProduct(vbar) + s.v_outer);
}

double Reduction::assembled_residual(const ReducedState& s) const {
    const DoubleWell& w = h_->potential();
    const GraphDiffeo d(*geo_, cut_, s.displacement);
    const ScalarField u = solution(s);
    ScalarField r = -allen_cahn_residual(*g_, w, eps_, u);
    if (s.c.size() > 0) {
        const SurfaceField mix = js_->kernel * s.c;
        for (int node = 0; node < g_->size(); ++node) {
            const int y = geo_->node_gamma(node);
            if (y < 0) continue;
            const double zs = d.forward(y, geo_->node_z(node));
            const double cutoff = cut_(4, zs);
            if (cutoff == 0.0) continue;
            r[node] += eps_ * mix[y] * tube_.profile_at(zs) * cutoff;
        }
    }
    return r.cwiseAbs().maxCoeff();
}

ReducedState Reduction::difference(const ReducedState& a, const ReducedState& b) const {
    ReducedState d;
    d.v_outer = a.v_outer - b.v_outer;
    d.v_tube = a.v_tube - b.v_tube;
    d.displacement = a.displacement - b.displacement;
    return d;
}

FixedPointReport Reduction::fixed_point(const FixedPointConfig& cfg) const {
    FixedPointReport rep;
    ReducedState s = zero_state();
    const double target = cfg.tol_fp * eps_ * eps_;
    double omega = cfg.initial_relaxation;
    if (!(omega > 0.0 && omega <= 1.0)) throw rejected("fixed point: relaxation must lie in (0,1]");
    double prev = -1.0;
    int polish = 0;
    const auto norm_of = [&](const ReducedState& x) {
        return state_norms(*g_, *geo_, tube_.layout, cut_, cfg.alpha, x.v_outer, x.v_tube, x.displacement);
    };
    for (int it = 1; it <= cfg.max_iter + cfg.polish_iter; ++it) {
        ReducedState t;
        try {
            t = step(s);
        } catch (const rejected& e) {
            rep.aborted = !rep.converged;
            rep.abort_reason = e.what();
            break;
        }
        const double dn = norm_of(difference(t, s)).total();
        for (int j = 0; j < js_->nullity; ++j)
            rep.displacement_orthogonality = std::max(rep.displacement_orthogonality, std::abs(js_->dot(js_->kernel.col(j), t.displacement)));
        ++rep.total_iterations;
        if (!rep.converged) {
            rep.history.push_back(dn);
            if (prev >= 0.0) rep.ratios.push_back(prev > 0.0 ? dn / prev : 0.0);
            rep.c_history.push_back(t.c.size() ? t.c.cwiseAbs().maxCoeff() : 0.0);
            const std::size_t nr = rep.ratios.size();
            if (nr >= 3 && rep.ratios[nr - 1] >= 1.0 && rep.ratios[nr - 2] >= 1.0 && rep.ratios[nr - 3] >= 1.0) {
                rep.aborted = true;
                rep.abort_reason = "diverging: three consecutive ratios at or above one";
                break;
            }
            if (cfg.relaxation && omega > 0.5 && nr >= 2 && rep.ratios[nr - 1] > 0.9 && rep.ratios[nr - 2] > 0.9)
                omega = 0.5;
        } else if (dn >= prev) {
            break;  // rounding floor reached while polishing
        }
        ReducedState next = t;
        if (omega != 1.0) {
            next.v_outer = s.v_outer + omega * (t.v_outer - s.v_outer);
            next.v_tube = s.v_tube + omega * (t.v_tube - s.v_tube);
            next.displacement = s.displacement + omega * (t.displacement - s.displacement);
        }
        s = next;
        prev = dn;
        if (!rep.converged && dn <= target) {
            rep.converged = true;
            rep.iterations = it;
        }
        if (rep.converged) {
            if (dn <= cfg.polish_tol || polish >= cfg.polish_iter) break;
            ++polish;
        }
        if (!rep.converged && it >= cfg.max_iter) break;
    }
    if (!rep.converged && !rep.aborted) rep.iterations = rep.total_iterations;
    rep.relaxation = omega;
    s.norms = norm_of(s);
    rep.state_norm = s.norms.total();
    rep.state = s;
    rep.u = solution(s);
    rep.assembled_residual = assembled_residual(s);
    return rep;
}

ScalarField allen_cahn_residual(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u) {
    ScalarField f = -eps * eps * g.laplacian(u);
    for (int i = 0; i < f.size(); ++i) f[i] += w.d1(u[i]);
    return f;
}

NewtonResult newton_solve(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u0,
                          const NewtonOptions& opt) {
    if (!(eps > 0.0)) throw rejected("newton: eps must be positive");
    if (u0.size() != g.size()) throw rejected("newton: initial field size mismatch");
    NewtonResult res;
    res.u = u0;
    const Eigen::VectorXd& d = g.weights();
    const auto merit = [&](const ScalarField& f) { return std::sqrt((d.array() * f.array().square()).sum()); };
    ScalarField f = allen_cahn_residual(g, w, eps, res.u);
    res.residual = f.cwiseAbs().maxCoeff();
    const bool constant_start = (u0.array() == u0[0]).all() && std::abs(std::abs(u0[0]) - w.well) == 0.0;
    if (constant_start && res.residual <= opt.tol) {
        res.converged = true;
        res.trivial = true;
        res.status = "trivial";
        return res;
    }

    const SparseMatrix k = g.stiffness();
    SparseMatrix jac = -eps * eps * k;
    for (int i = 0; i < g.size(); ++i) jac.coeffRef(i, i) += 0.0;
    jac.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.analyzePattern(jac);

    int extra = 0;
    double m0 = merit(f);
    res.status = "max_iter";
    for (int it = 0; it < opt.max_iter; ++it) {
        if (res.residual <= opt.tol) {
            if (extra >= opt.polish) break;
            ++extra;
        }
        SparseMatrix j = -eps * eps * k;
        for (int i = 0; i < g.size(); ++i) j.coeffRef(i, i) += d[i] * w.d2(res.u[i]);
        j.makeCompressed();
        lu.factorize(j);
        if (lu.info() != Eigen::Success) {
            res.status = "jacobian_singular";
            break;
        }
        const Eigen::VectorXd delta = lu.solve(-d.cwiseProduct(f));
        double lambda = 1.0;
        ScalarField trial;
        ScalarField ft;
        double mt = 0.0;
        for (int ls = 0; ls < 40; ++ls) {
            trial = res.u + lambda * delta;
            ft = allen_cahn_residual(g, w, eps, trial);
            mt = merit(ft);
            if (mt <= (1.0 - 1e-4 * lambda) * m0 || (res.residual <= opt.tol && mt <= m0)) break;
            lambda *= 0.5;
        }
        if (!(mt <= m0)) {
            if (res.residual <= opt.tol) break;  // rounding floor
            res.status = "line_search_failed";
            break;
        }
        res.u = trial;
        f = ft;
        m0 = mt;
        res.residual = f.cwiseAbs().maxCoeff();
        ++res.iterations;
    }
    res.converged = res.residual <= opt.tol;
    if (res.converged) {
        res.status = "converged";
        const double grad = std::sqrt(g.grad_norm2(res.u).maxCoeff());
        if (grad * eps < 1e-8) {
            res.trivial = true;
            if (!constant_start) {
                res.converged = false;
                res.status = "basin_escape";
            }
        }
    }
    return res;
}

double killing_pairing(const ManifoldGrid& g, const DoubleWell& w, double eps, const ScalarField& u,
                       const VectorField& y) {
    const ScalarField f = allen_cahn_residual(g, w, eps, u);
    return g.integrate(f.cwiseProduct(g.directional(y, u))) / eps;
}

CVanishingVerdict c_vanishing_check(const ManifoldGrid& g, const InterfaceGeometry& geo, const JacobiSystem& js,
                                    const Heteroclinic& h, const Reduction& red, const FixedPointReport& report,
                                    double tol_fp, double structure_tol) {
    CVanishingVerdict v;
    const double eps = red.eps();
    const auto& cut = red.cut();
    const int jn = js.nullity, rows = static_cast<int>(js.selected.size());
    v.tolerance = std::max(1e-8, tol_fp * eps * eps);
    v.a = Eigen::MatrixXd::Zero(rows, jn);
    v.b = js.b;
    const SurfaceField& displacement = report.state.displacement;
    for (int node = 0; node < g.size(); ++node) {
        const int y = geo.node_gamma(node);
        if (y < 0) continue;
        const double zs = geo.node_z(node) - displacement[y];
        const double cutoff = cut(4, zs);
        if (cutoff == 0.0) continue;
        const double s = h.derivative(zs / eps);
        const double weight = g.weights()[node] * s * s * cutoff / eps;
        for (int i = 0; i < rows; ++i) {
            const double zi = js.killing_jacobi[js.selected[i]][y];
            if (zi == 0.0) continue;
            for (int j = 0; j < jn; ++j) v.a(i, j) += weight * js.kernel(y, j) * zi;
        }
    }
    const double bn = v.b.norm();
    v.structure_error = bn > 0 ? (v.a / h.sigma_energy() - v.b).norm() / bn : INFINITY;
    const auto fields = killing_fields(g);
    v.pairings.resize(rows);
    for (int i = 0; i < rows; ++i)
        v.pairings[i] = killing_pairing(g, h.potential(), eps, report.u, fields.at(js.selected[i]).field);
    v.max_c_fixed_point = report.state.c.size() ? report.state.c.cwiseAbs().maxCoeff() : 0.0;
    if (rows != jn || jn == 0) {
        v.condition = INFINITY;
        v.reason = jn == 0 ? "no kernel" : "Killing span does not match the Jacobi kernel";
        return v;
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(v.a);
    const auto& sv = svd.singularValues();
    v.condition = sv[jn - 1] > 0 ? sv[0] / sv[jn - 1] : INFINITY;
    if (!(v.condition < 1e12)) {
        v.reason = "pairing matrix singular";
        return v;
    }
    v.c_pairing = v.a.partialPivLu().solve(-v.pairings);
    v.max_c_pairing = v.c_pairing.cwiseAbs().maxCoeff();
    v.pass = report.converged && v.structure_error <= structure_tol && v.max_c_fixed_point <= v.tolerance &&
             v.max_c_pairing <= v.tolerance;
    if (!v.pass) {
        if (!report.converged) v.reason = "fixed point did not converge";
        else if (v.structure_error > structure_tol) v.reason = "pairing matrix deviates from sigma B";
        else v.reason = "projection constants above tolerance";
    }
    return v;
}

}  // namespace ac
