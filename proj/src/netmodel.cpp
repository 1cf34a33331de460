#include "greybox/netmodel.hpp"

#include <cmath>
#include <set>

#include "greybox/errors.hpp"

namespace greybox {

namespace {

bool uses_rl(ComponentKind k) { return k == ComponentKind::SeriesRL || k == ComponentKind::ParallelRLC; }
bool uses_c(ComponentKind k) { return k == ComponentKind::Capacitor || k == ComponentKind::ParallelRLC; }

std::set<std::string> allowed_params(ComponentKind k) {
    std::set<std::string> out;
    if (uses_rl(k)) out.insert({"R", "L"});
    if (uses_c(k)) out.insert("C");
    return out;
}

void add_block(RationalMatrix& m, int row0, int col0, const RationalBlock& b, double sign) {
    for (int r = 0; r < b.width; ++r)
        for (int c = 0; c < b.width; ++c) {
            const RationalFunction& y = b.at(r, c);
            if (y.is_zero()) continue;
            RationalFunction& e = m(row0 + r, col0 + c);
            e = sign > 0 ? e + y : e - y;
        }
}

// Sum of shunt admittances at each node.
std::vector<std::optional<RationalBlock>> shunt_sums(const NetworkModel& net) {
    std::vector<std::optional<RationalBlock>> sums(net.nodes().size());
    for (const auto& c : net.components()) {
        if (!c.is_shunt()) continue;
        RationalBlock y = component_admittance(c);
        auto& s = sums[c.from];
        if (!s) {
            s = std::move(y);
            continue;
        }
        for (std::size_t k = 0; k < y.entries.size(); ++k) s->entries[k] = s->entries[k] + y.entries[k];
    }
    return sums;
}


}  // namespace

const char* kind_name(ComponentKind kind) {
    switch (kind) {
        case ComponentKind::SeriesRL: return "rl";
        case ComponentKind::Capacitor: return "c";
        case ComponentKind::ParallelRLC: return "rlc";
        case ComponentKind::Rational: return "rational";
        case ComponentKind::Spectrum: return "spectrum";
    }
    return "?";
}

ComplexMatrix RationalBlock::evaluate(Complex s) const {
    ComplexMatrix out(width, width);
    for (int r = 0; r < width; ++r)
        for (int c = 0; c < width; ++c) out(r, c) = at(r, c)(s);
    return out;
}

double Component::param(const std::string& name) const {
    const auto it = params.find(name);
    if (it == params.end()) throw UsageError("component '" + id + "' has no parameter '" + name + "'");
    return it->second;
}

int NetworkModel::add_node(std::string id, int ports) {
    nodes_.push_back({std::move(id), ports});
    return static_cast<int>(nodes_.size()) - 1;
}

void NetworkModel::add_component(Component c) { components_.push_back(std::move(c)); }

void NetworkModel::add_shunt(std::string id, int node, ComponentKind kind, std::map<std::string, double> params) {
    Component c;
    c.id = std::move(id);
    c.kind = kind;
    c.from = node;
    c.params = std::move(params);
    components_.push_back(std::move(c));
}

void NetworkModel::add_branch(std::string id, int from, int to, std::map<std::string, double> params) {
    Component c;
    c.id = std::move(id);
    c.kind = ComponentKind::SeriesRL;
    c.from = from;
    c.to = to;
    c.params = std::move(params);
    components_.push_back(std::move(c));
}

int NetworkModel::node_index(const std::string& id) const {
    for (std::size_t k = 0; k < nodes_.size(); ++k)
        if (nodes_[k].id == id) return static_cast<int>(k);
    throw UsageError("unknown node '" + id + "'");
}

int NetworkModel::component_index(const std::string& id) const {
    for (std::size_t k = 0; k < components_.size(); ++k)
        if (components_[k].id == id) return static_cast<int>(k);
    throw UsageError("unknown component '" + id + "'");
}

int NetworkModel::port_count() const {
    int n = 0;
    for (const auto& node : nodes_) n += node.ports;
    return n;
}

int NetworkModel::port_offset(int node) const {
    int n = 0;
    for (int k = 0; k < node; ++k) n += nodes_[k].ports;
    return n;
}

bool NetworkModel::has_spectrum_apparatus() const {
    for (const auto& c : components_)
        if (c.kind == ComponentKind::Spectrum) return true;
    return false;
}

bool NetworkModel::is_passive_rlc() const {
    for (const auto& c : components_)
        if (c.kind == ComponentKind::Rational || c.kind == ComponentKind::Spectrum) return false;
    return true;
}

void NetworkModel::validate() const {
    if (nodes_.empty()) throw UsageError("network has no nodes");
    std::set<std::string> seen;
    for (const auto& node : nodes_) {
        if (node.id.empty()) throw UsageError("node with empty id");
        if (!seen.insert(node.id).second) throw UsageError("duplicate node id '" + node.id + "'");
        if (node.ports != 1 && node.ports != 2)
            throw UsageError("node '" + node.id + "': ports must be 1 or 2");
    }
    const int n = static_cast<int>(nodes_.size());
    std::vector<bool> touched(nodes_.size(), false);
    seen.clear();
    for (const auto& c : components_) {
        const std::string who = "component '" + c.id + "'";
        if (c.id.empty()) throw UsageError("component with empty id");
        if (!seen.insert(c.id).second) throw UsageError("duplicate component id '" + c.id + "'");
        if (c.from < 0 || c.from >= n) throw UsageError(who + " references a missing node");
        if (!c.is_shunt()) {
            if (c.to >= n) throw UsageError(who + " references a missing node");
            if (c.to == c.from) throw UsageError(who + " connects node '" + nodes_[c.from].id + "' to itself");
            if (c.kind == ComponentKind::Capacitor || c.kind == ComponentKind::ParallelRLC)
                throw UsageError(who + ": kind '" + kind_name(c.kind) + "' is shunt only");
            if (c.kind == ComponentKind::Spectrum) throw UsageError(who + ": spectrum references are shunt only");
        }
        touched[c.from] = true;
        if (!c.is_shunt()) touched[c.to] = true;

        const int ports_from = nodes_[c.from].ports;
        if (!c.is_shunt() && nodes_[c.to].ports != ports_from)
            throw UsageError(who + " joins nodes of different port width");

        if (c.kind == ComponentKind::Rational) {
            if (!c.block) throw UsageError(who + " has no rational block");
            if (c.block->width != ports_from)
                throw UsageError(who + ": block width " + std::to_string(c.block->width) + " does not match port width " +
                                 std::to_string(ports_from));
            if (static_cast<int>(c.block->entries.size()) != c.block->width * c.block->width)
                throw UsageError(who + ": block is not square");
            if (!c.params.empty()) throw UsageError(who + ": rational blocks take no R, L, C parameters");
            continue;
        }
        if (c.kind == ComponentKind::Spectrum) {
            if (c.spectrum_source.empty()) throw UsageError(who + " has no spectrum file");
            continue;
        }
        if (ports_from != 1) throw UsageError(who + ": R, L, C kinds need single-port nodes");
        const auto allowed = allowed_params(c.kind);
        for (const auto& [name, value] : c.params) {
            if (!allowed.count(name))
                throw UsageError(who + ": parameter '" + name + "' does not apply to kind '" + kind_name(c.kind) + "'");
            if (!std::isfinite(value)) throw UsageError(who + ": parameter '" + name + "' is not finite");
        }
        for (const auto& name : allowed)
            if (!c.params.count(name)) throw UsageError(who + ": missing parameter '" + name + "'");
        if (uses_rl(c.kind)) {
            if (c.params.at("R") < 0.0) throw UsageError(who + ": R must be >= 0");
            if (c.params.at("L") <= 0.0) throw UsageError(who + ": L must be > 0");
        }
        if (uses_c(c.kind) && c.params.at("C") <= 0.0) throw UsageError(who + ": C must be > 0");
    }
    for (int k = 0; k < n; ++k)
        if (!touched[k]) throw UsageError("node '" + nodes_[k].id + "' is floating (no component attached)");
}

NetworkModel NetworkModel::with_parameter(const std::string& component_id, const std::string& param,
                                          double value) const {
    NetworkModel out = *this;
    Component& c = out.components_[component_index(component_id)];
    if (!allowed_params(c.kind).count(param))
        throw UsageError("component '" + component_id + "' has no parameter '" + param + "'");
    c.params[param] = value;
    return out;
}

NetworkModel NetworkModel::with_scaled_admittance(const std::string& component_id, double factor) const {
    NetworkModel out = *this;
    Component& c = out.components_[component_index(component_id)];
    switch (c.kind) {
        case ComponentKind::Rational:
            for (auto& e : c.block->entries) e = RationalFunction(e.num().scaled(factor), e.den());
            c.block->num_coeffs.clear();
            c.block->den_coeffs.clear();
            break;
        case ComponentKind::Spectrum:
            throw UsageError("component '" + component_id + "' has no rational model to scale");
        default:
            if (uses_rl(c.kind)) {
                c.params["R"] /= factor;
                c.params["L"] /= factor;
            }
            if (uses_c(c.kind)) c.params["C"] *= factor;
    }
    return out;
}

RationalBlock component_admittance(const Component& c) {
    RationalBlock b;
    switch (c.kind) {
        case ComponentKind::Rational:
            return *c.block;
        case ComponentKind::Spectrum:
            throw UsageError("rational model required; use measurement route (component '" + c.id + "')");
        case ComponentKind::SeriesRL:
            b.entries = {RationalFunction(Polynomial{1.0}, Polynomial{c.param("R"), c.param("L")})};
            return b;
        case ComponentKind::Capacitor:
            b.entries = {RationalFunction(Polynomial{0.0, c.param("C")})};
            return b;
        case ComponentKind::ParallelRLC: {
            const double r = c.param("R"), l = c.param("L"), cap = c.param("C");
            b.entries = {RationalFunction(Polynomial{1.0, r * cap, l * cap}, Polynomial{r, l})};
            return b;
        }
    }
    return b;
}

ComplexMatrix param_derivative(const Component& c, const std::string& param, Complex s) {
    if (!allowed_params(c.kind).count(param))
        throw UsageError("parameter '" + param + "' does not belong to component '" + c.id + "'");
    ComplexMatrix out(1, 1);
    if (param == "C") {
        out(0, 0) = s;
    } else {
        const Complex z = c.param("R") + s * c.param("L");
        out(0, 0) = (param == "R" ? Complex(-1.0) : -s) / (z * z);
    }
    return out;
}

RationalMatrix build_ynetwork(const NetworkModel& net) {
    RationalMatrix y(net.port_count());
    for (const auto& c : net.components()) {
        if (c.is_shunt()) continue;
        const RationalBlock b = component_admittance(c);
        const int k = net.port_offset(c.from), i = net.port_offset(c.to);
        add_block(y, k, k, b, 1.0);
        add_block(y, i, i, b, 1.0);
        add_block(y, k, i, b, -1.0);
        add_block(y, i, k, b, -1.0);
    }
    return y;
}

RationalMatrix build_yapparatus(const NetworkModel& net) {
    RationalMatrix y(net.port_count());
    for (const auto& c : net.components()) {
        if (!c.is_shunt()) continue;
        const int k = net.port_offset(c.from);
        add_block(y, k, k, component_admittance(c), 1.0);
    }
    return y;
}

RationalMatrix build_ynodal(const NetworkModel& net) {
    for (const auto& c : net.components())
        if (c.kind == ComponentKind::Spectrum)
            throw UsageError("rational model required; use measurement route (component '" + c.id + "')");
    // Added component by component so each entry is a plain sum of admittances.
    RationalMatrix y(net.port_count());
    for (const auto& c : net.components()) {
        const RationalBlock b = component_admittance(c);
        const int k = net.port_offset(c.from);
        add_block(y, k, k, b, 1.0);
        if (c.is_shunt()) continue;
        const int i = net.port_offset(c.to);
        add_block(y, i, i, b, 1.0);
        add_block(y, k, i, b, -1.0);
        add_block(y, i, k, b, -1.0);
    }
    return y;
}

std::optional<RationalMatrix> build_zapparatus(const NetworkModel& net) {
    const auto sums = shunt_sums(net);
    RationalMatrix z(net.port_count());
    for (std::size_t node = 0; node < sums.size(); ++node) {
        if (!sums[node]) return std::nullopt;
        const RationalBlock& b = *sums[node];
        RationalMatrix m(b.width);
        for (int r = 0; r < b.width; ++r)
            for (int c = 0; c < b.width; ++c) m(r, c) = b.at(r, c);
        RationalMatrix inv;
        try {
            inv = rat_inverse(m);
        } catch (const NumericalError&) {
            return std::nullopt;
        }
        const int k = net.port_offset(static_cast<int>(node));
        for (int r = 0; r < b.width; ++r)
            for (int c = 0; c < b.width; ++c) z(k + r, k + c) = inv(r, c);
    }
    return z;
}

RationalMatrix whole_system_impedance(const RationalMatrix& yn, const RationalMatrix& za) {
    const RationalMatrix f = RationalMatrix::identity(yn.dim()) + yn * za;
    return (za * rat_inverse(f)).normalized();
}

RationalMatrix whole_system_admittance(const RationalMatrix& yn, const RationalMatrix& za) {
    const RationalMatrix f = RationalMatrix::identity(yn.dim()) + yn * za;
    return (rat_inverse(f) * yn).normalized();
}

WholeSystemModel build_zsys(const NetworkModel& net) {
    // Z_A (I + Y_N Z_A)^-1 = Z_A (Y_nodal Z_A)^-1 = Y_nodal^-1. Expanding the
    // left side symbolically compounds rounding in every product, so both
    // routes invert Y_nodal; the flag records whether Z_A exists.
    const RationalMatrix ynodal = build_ynodal(net);
    return {rat_inverse(ynodal), !build_zapparatus(net).has_value()};
}

WholeSystemModel build_ysys(const NetworkModel& net) {
    // (I + Y_N Z_A)^-1 Y_N = Y_N - Y_N Z_sys Y_N = Y_N Z_sys Y_A. The product
    // form avoids the cancelling subtraction and also covers Z_A-free nets.
    const WholeSystemModel z = build_zsys(net);
    return {(build_ynetwork(net) * z.matrix * build_yapparatus(net)).normalized(), z.za_free};
}

ZsysEvaluator::ZsysEvaluator(const NetworkModel& net) : ynetwork_(build_ynetwork(net)), ynodal_(build_ynodal(net)) {
    const auto sums = shunt_sums(net);
    for (std::size_t node = 0; node < sums.size(); ++node) {
        if (!sums[node]) {
            za_free_ = true;
            shunts_.clear();
            return;
        }
        shunts_.emplace_back(net.port_offset(static_cast<int>(node)), *sums[node]);
    }
}

ComplexMatrix ZsysEvaluator::operator()(Complex s) const {
    const int n = ynodal_.dim();
    if (za_free_) return ynodal_.evaluate(s).partialPivLu().inverse();
    ComplexMatrix za = ComplexMatrix::Zero(n, n);
    for (const auto& [k, block] : shunts_) {
        const ComplexMatrix ya = block.evaluate(s);
        Eigen::FullPivLU<ComplexMatrix> lu(ya);
        if (!lu.isInvertible()) return ynodal_.evaluate(s).partialPivLu().inverse();
        za.block(k, k, ya.rows(), ya.cols()) = lu.inverse();
    }
    const ComplexMatrix f = ComplexMatrix::Identity(n, n) + ynetwork_.evaluate(s) * za;
    // Z = Z_A F^-1, i.e. F^T Z^T = Z_A^T.
    return f.transpose().partialPivLu().solve(za.transpose()).transpose();
}

Eigen::MatrixXd IncidencePattern::dense(const NetworkModel& net) const {
    const int n = net.port_count();
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (const auto& b : blocks) {
        const int r = net.port_offset(b.row_node), c = net.port_offset(b.col_node);
        for (int p = 0; p < width; ++p) out(r + p, c + p) += b.sign;
    }
    return out;
}

IncidencePattern incidence_pattern(const NetworkModel& net, const std::string& component_id) {
    const Component& c = net.component(component_id);
    IncidencePattern p;
    p.component = c.id;
    p.width = net.nodes()[c.from].ports;
    p.blocks.push_back({c.from, c.from, 1});
    if (!c.is_shunt()) {
        p.blocks.push_back({c.to, c.to, 1});
        p.blocks.push_back({c.from, c.to, -1});
        p.blocks.push_back({c.to, c.from, -1});
    }
    return p;
}

}  // namespace greybox
