#include "leakfix/analysis/leaks.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace leakfix::analysis {

namespace {

using SiteSet = std::set<std::size_t>;

// A site's abstract value is the set of (status, adoption) pairs it may be
// in, one bit per pair. Keeping pairs rather than two independent bit sets
// stops a join from inventing "open and free" out of "unopened and free"
// on one path and "open and adopted" on another.
enum Status : int { kUnopened = 0, kOpen = 1, kClosed = 2 };
enum Adoption : int { kFree = 0, kAdopted = 1 };

constexpr std::uint8_t combo(int status, int adoption) { return static_cast<std::uint8_t>(1u << (status * 2 + adoption)); }
constexpr std::uint8_t with_status(int status) { return combo(status, kFree) | combo(status, kAdopted); }
constexpr std::uint8_t with_adoption(int adoption) {
    return combo(kUnopened, adoption) | combo(kOpen, adoption) | combo(kClosed, adoption);
}

// Rewrites every pair selected by `from` with f. A strong update drops the
// old pair; a weak one keeps it alongside.
template <class F>
std::uint8_t rewrite(std::uint8_t mask, std::uint8_t from, bool strong, F f) {
    const std::uint8_t selected = mask & from;
    std::uint8_t added = 0;
    for (int st = 0; st < 3; ++st)
        for (int ad = 0; ad < 2; ++ad)
            if (selected & combo(st, ad)) {
                auto [st2, ad2] = f(st, ad);
                added |= combo(st2, ad2);
            }
    return static_cast<std::uint8_t>((strong ? mask & ~selected : mask) | added);
}

struct SiteBits {
    std::uint8_t pairs = combo(kUnopened, kFree);
    bool overwritten_open = false;  // re-allocated while a previous object may still be open

    bool operator==(const SiteBits&) const = default;
};

struct State {
    std::vector<SiteBits> sites;
    std::map<std::string, SiteSet> locals;

    bool operator==(const State&) const = default;

    // Returns true when this grew.
    bool join(const State& other) {
        bool grew = false;
        for (std::size_t i = 0; i < sites.size(); ++i) {
            SiteBits merged{static_cast<std::uint8_t>(sites[i].pairs | other.sites[i].pairs),
                            sites[i].overwritten_open || other.sites[i].overwritten_open};
            if (!(merged == sites[i])) {
                sites[i] = merged;
                grew = true;
            }
        }
        for (const auto& [var, set] : other.locals) {
            auto& mine = locals[var];
            std::size_t before = mine.size();
            mine.insert(set.begin(), set.end());
            grew |= mine.size() != before;
        }
        return grew;
    }
};

OpenStatus status_of(std::uint8_t pairs) {
    if (pairs & with_status(kOpen))
        return (pairs & ~with_status(kOpen)) ? OpenStatus::MaybeOpen : OpenStatus::Open;
    return (pairs & with_status(kClosed)) ? OpenStatus::Closed : OpenStatus::Unopened;
}

class Analyzer {
public:
    Analyzer(const ir::ProcDef& proc, const Cfg& cfg, const ResourceConfig& config)
        : proc_(proc), cfg_(cfg), config_(config) {
        for (std::size_t b = 0; b < proc.blocks.size(); ++b) {
            const auto& instrs = proc.blocks[b].instrs;
            for (std::size_t i = 0; i < instrs.size(); ++i)
                if (auto* a = std::get_if<ir::Alloc>(&instrs[i]); a && config.is_resource(a->cls.class_name())) {
                    site_at_[{b, i}] = sites_.size();
                    sites_.push_back({{proc.blocks[b].label, i}, a->cls.class_name(), std::nullopt});
                }
        }
    }

    AnalysisResult run() {
        AnalysisResult result;
        const std::size_t n = proc_.blocks.size();
        in_.assign(n, std::nullopt);
        in_[cfg_.entry] = initial();

        const auto rpo = cfg_.reverse_postorder();
        std::vector<char> reachable(n, 0);
        for (auto b : rpo) reachable[b] = 1;

        bool changed = true;
        while (changed) {
            changed = false;
            for (auto b : rpo) {
                if (!in_[b]) continue;
                changed |= transfer_block(b, /*record=*/false);
            }
        }
        exit_state_.reset();
        after_.assign(n, {});
        thrown_in_.assign(n, std::nullopt);
        temps_after_.assign(n, {});
        for (auto b : rpo)
            if (in_[b]) transfer_block(b, /*record=*/true);

        for (std::size_t b = 0; b < n; ++b)
            if (!reachable[b])
                result.diagnostics.push_back(proc_.name.str() + ": block #" + proc_.blocks[b].label +
                                             " is unreachable from the entry; ignored");

        result.sites = sites_;
        result.at_exit.resize(sites_.size());
        if (exit_state_) {
            for (std::size_t s = 0; s < sites_.size(); ++s) {
                ResourceState rs;
                rs.status = status_of(exit_state_->sites[s].pairs);
                for (const auto& [var, set] : exit_state_->locals)
                    if (set.count(s)) rs.referencing_locals.insert(var);
                for (std::size_t w = 0; w < sites_.size(); ++w)
                    if (sites_[w].owner == s) rs.wraps = w;
                result.at_exit[s] = std::move(rs);
            }
        }

        std::vector<std::size_t> rpo_pos(n, n);
        for (std::size_t k = 0; k < rpo.size(); ++k) rpo_pos[rpo[k]] = k;
        for (auto r : roots_) result.reports.push_back(make_report(r, rpo_pos));
        return result;
    }

private:
    const ir::ProcDef& proc_;
    const Cfg& cfg_;
    const ResourceConfig& config_;
    std::vector<SiteInfo> sites_;
    std::map<std::pair<std::size_t, std::size_t>, std::size_t> site_at_;
    std::vector<std::optional<State>> in_;
    std::optional<State> exit_state_;
    std::set<std::size_t> roots_;
    std::vector<std::optional<State>> thrown_in_;  // join of states entering each block by a throw
    // recorded in the final pass
    std::vector<std::vector<State>> after_;
    std::vector<std::vector<std::map<std::string, SiteSet>>> temps_after_;

    State initial() const {
        State s;
        s.sites.assign(sites_.size(), SiteBits{});
        return s;
    }

    std::size_t top_owner(std::size_t s) const {
        std::size_t guard = 0;
        while (sites_[s].owner && guard++ < sites_.size()) s = *sites_[s].owner;
        return s;
    }

    bool flow_into(std::size_t target, const State& st) {
        if (!in_[target]) {
            in_[target] = st;
            return true;
        }
        return in_[target]->join(st);
    }

    // Roots are judged per exit: joining first would mix the free bit of an
    // early exit with the open bit of a later one.
    void flow_exit(const State& st) {
        for (std::size_t s = 0; s < sites_.size(); ++s) {
            const auto& bits = st.sites[s];
            const bool open_free = bits.pairs & combo(kOpen, kFree);
            const bool open_adopted = bits.pairs & combo(kOpen, kAdopted);
            if (!sites_[s].owner) {
                if (open_free || open_adopted || bits.overwritten_open) roots_.insert(s);
                continue;
            }
            if (open_free || bits.overwritten_open) roots_.insert(s);
            if (open_adopted) roots_.insert(top_owner(s));
        }
        if (!exit_state_)
            exit_state_ = st;
        else
            exit_state_->join(st);
    }

    // Closes s; resources it adopted are closed with it, but only in the
    // pairs where they are actually adopted.
    void close_site(State& st, std::size_t s, bool strong, std::uint8_t from = 0xff, int depth = 0) {
        auto& pairs = st.sites[s].pairs;
        const bool was_open = pairs & from & with_status(kOpen);
        pairs = rewrite(pairs, from & with_status(kOpen), strong, [](int, int ad) { return std::pair{int(kClosed), ad}; });
        if (!was_open || depth > static_cast<int>(sites_.size())) return;
        for (std::size_t w = 0; w < sites_.size(); ++w)
            if (sites_[w].owner == s) close_site(st, w, strong, with_adoption(kAdopted), depth + 1);
    }

    void close_all(State& st, const SiteSet& targets) {
        for (auto s : targets) close_site(st, s, targets.size() == 1);
    }

    static const SiteSet& temp_sites(const std::map<std::string, SiteSet>& temps, const ir::Operand& op) {
        static const SiteSet empty;
        if (auto* t = std::get_if<ir::Temp>(&op)) {
            auto it = temps.find(t->name);
            if (it != temps.end()) return it->second;
        }
        return empty;
    }

    // Runs one block from its entry state. Returns whether any successor or
    // handler entry state grew. With record set, stores per-instruction
    // states for the reporting step and feeds the exit join.
    bool transfer_block(std::size_t b, bool record) {
        const auto& block = proc_.blocks[b];
        const auto& node = cfg_.nodes[b];
        State st = *in_[b];
        std::map<std::string, SiteSet> temps;
        bool grew = false;

        for (std::size_t i = 0; i < block.instrs.size(); ++i) {
            const auto& instr = block.instrs[i];
            if (may_throw(instr, config_)) {
                if (node.handlers.empty()) {
                    if (record) flow_exit(st);
                } else {
                    for (auto h : node.handlers) {
                        grew |= flow_into(h, st);
                        if (record) {
                            if (!thrown_in_[h]) thrown_in_[h] = st;
                            else thrown_in_[h]->join(st);
                        }
                    }
                }
            }
            step(st, temps, b, i, instr);
            if (record) {
                after_[b].push_back(st);
                temps_after_[b].push_back(temps);
            }
        }
        if (node.successors.empty()) {
            if (record) flow_exit(st);
        } else {
            for (auto s : node.successors) grew |= flow_into(s, st);
        }
        return grew;
    }

    void step(State& st, std::map<std::string, SiteSet>& temps, std::size_t b, std::size_t i, const ir::Instr& instr) {
        std::visit(
            [&](const auto& in) {
                using T = std::decay_t<decltype(in)>;
                if constexpr (std::is_same_v<T, ir::Alloc>) {
                    auto it = site_at_.find({b, i});
                    if (it == site_at_.end()) {
                        temps[in.dest.name] = {};
                        return;
                    }
                    auto& bits = st.sites[it->second];
                    if (bits.pairs & with_status(kOpen)) bits.overwritten_open = true;
                    bits.pairs = combo(kUnopened, kFree);
                    temps[in.dest.name] = {it->second};
                } else if constexpr (std::is_same_v<T, ir::StaticCall>) {
                    if (is_close_call(instr, config_)) {
                        if (!in.args.empty()) close_all(st, temp_sites(temps, in.args[0]));
                    } else if (in.callee.method == "<init>" && config_.is_resource(in.callee.class_name()) &&
                               !in.args.empty()) {
                        const SiteSet& opened = temp_sites(temps, in.args[0]);
                        for (auto s : opened) {
                            st.sites[s].pairs = rewrite(st.sites[s].pairs, 0xff, opened.size() == 1,
                                                        [](int, int ad) { return std::pair{int(kOpen), ad}; });
                        }
                        if (config_.is_wrapper(in.callee.class_name()) && opened.size() == 1) {
                            std::size_t w = *opened.begin();
                            for (std::size_t k = 1; k < in.args.size(); ++k) {
                                const SiteSet& inner = temp_sites(temps, in.args[k]);
                                for (auto s : inner) {
                                    if (s == w) continue;
                                    if (!sites_[s].owner) sites_[s].owner = w;
                                    if (sites_[s].owner != w) continue;
                                    st.sites[s].pairs = rewrite(st.sites[s].pairs, 0xff, inner.size() == 1,
                                                                [](int st2, int) { return std::pair{st2, int(kAdopted)}; });
                                }
                            }
                        }
                    }
                    temps[in.dest.name] = {};
                } else if constexpr (std::is_same_v<T, ir::VirtualCall>) {
                    if (is_close_call(instr, config_)) {
                        auto it = temps.find(in.recv.name);
                        if (it != temps.end()) close_all(st, it->second);
                    }
                    temps[in.dest.name] = {};
                } else if constexpr (std::is_same_v<T, ir::Store>) {
                    st.locals[in.var] = temp_sites(temps, in.src);
                } else {
                    if (auto* v = std::get_if<ir::VarRef>(&in.src)) {
                        auto it = st.locals.find(v->name);
                        temps[in.dest.name] = it == st.locals.end() ? SiteSet{} : it->second;
                    } else {
                        auto it = temps.find(std::get<ir::Temp>(in.src).name);
                        temps[in.dest.name] = it == temps.end() ? SiteSet{} : it->second;
                    }
                }
            },
            instr);
    }

    static bool intersects(const SiteSet& a, const SiteSet& group) {
        for (auto s : a)
            if (group.count(s)) return true;
        return false;
    }

    LeakReport make_report(std::size_t root, const std::vector<std::size_t>& rpo_pos) {
        SiteSet group{root};
        for (bool grew = true; grew;) {
            grew = false;
            for (std::size_t w = 0; w < sites_.size(); ++w)
                if (sites_[w].owner && group.count(*sites_[w].owner) && group.insert(w).second) grew = true;
        }

        std::set<std::string> carriers;
        for (const auto& states : after_)
            for (const auto& st : states)
                for (const auto& [var, set] : st.locals)
                    if (intersects(set, group)) carriers.insert(var);
        if (auto& entry = in_[cfg_.entry])
            for (const auto& [var, set] : entry->locals)
                if (intersects(set, group)) carriers.insert(var);

        const Liveness live = compute_liveness(cfg_, proc_);

        struct Mention {
            std::size_t block, index;
        };
        std::vector<Mention> mentions;
        for (std::size_t b = 0; b < proc_.blocks.size(); ++b) {
            if (!in_[b]) continue;
            const auto& instrs = proc_.blocks[b].instrs;
            for (std::size_t i = 0; i < instrs.size(); ++i) {
                const auto& before = i == 0 ? std::map<std::string, SiteSet>{} : temps_after_[b][i - 1];
                bool hit = false;
                if (auto v = ir::mentioned_local(instrs[i]); v && carriers.count(*v)) hit = true;
                for (const auto& t : ir::used_temps(instrs[i])) {
                    auto it = before.find(t);
                    if (it != before.end() && intersects(it->second, group)) hit = true;
                }
                if (const ir::Temp* d = ir::defined_temp(instrs[i])) {
                    auto it = temps_after_[b][i].find(d->name);
                    if (it != temps_after_[b][i].end() && intersects(it->second, group)) hit = true;
                }
                if (hit) mentions.push_back({b, i});
            }
        }

        auto later = [&](const Mention& a, const Mention& c) {
            return std::pair(rpo_pos[a.block], a.index) < std::pair(rpo_pos[c.block], c.index);
        };
        std::optional<Mention> chosen;
        for (std::size_t k = 0; k < mentions.size(); ++k) {
            const auto& m = mentions[k];
            bool last_in_block = k + 1 == mentions.size() || mentions[k + 1].block != m.block;
            if (!last_in_block) continue;
            bool dead = true;
            for (const auto& v : live.live_after(m.block, m.index))
                if (carriers.count(v)) dead = false;
            if (!dead) continue;
            if (!chosen || later(*chosen, m)) chosen = m;
        }
        if (!chosen)
            for (const auto& m : mentions)
                if (!chosen || later(*chosen, m)) chosen = m;

        LeakReport r;
        r.proc = proc_.name.str();
        r.site = sites_[root].pos;
        r.resource_class = sites_[root].cls;
        if (!chosen) {
            r.last_use = r.site;
            r.var = "";
            r.var_is_temp = true;
            return r;
        }
        const auto& block = proc_.blocks[chosen->block];
        r.last_use = {block.label, chosen->index};
        if (!block.handlers.empty()) r.handler_of_last_use = block.handlers.front();

        const State& st = after_[chosen->block][chosen->index];
        std::vector<std::string> holders;
        for (const auto& [var, set] : st.locals)
            if (set.count(root)) holders.push_back(var);
        auto mentioned = ir::mentioned_local(block.instrs[chosen->index]);
        if (mentioned && std::find(holders.begin(), holders.end(), *mentioned) != holders.end()) {
            r.var = *mentioned;
        } else if (!holders.empty()) {
            r.var = holders.front();
        } else {
            r.var_is_temp = true;
            for (const auto& [t, set] : temps_after_[chosen->block][chosen->index])
                if (set.count(root)) {
                    r.var = t;
                    break;
                }
        }
        if (!r.var_is_temp) {
            for (std::size_t h = 0; h < proc_.blocks.size(); ++h) {
                const auto& label = proc_.blocks[h].label;
                if (!thrown_in_[h] || label == r.handler_of_last_use) continue;
                const State& st = *thrown_in_[h];
                bool open = false;
                for (auto s : group) open |= (st.sites[s].pairs & with_status(kOpen)) != 0;
                auto held = st.locals.find(r.var);
                if (open && held != st.locals.end() && intersects(held->second, group) && !live.live_in[h].count(r.var))
                    r.dead_handlers.push_back(label);
            }
        }
        return r;
    }
};

}  // namespace

const char* to_string(OpenStatus s) {
    switch (s) {
        case OpenStatus::Unopened: return "Unopened";
        case OpenStatus::Open: return "Open";
        case OpenStatus::Closed: return "Closed";
        case OpenStatus::MaybeOpen: return "MaybeOpen";
    }
    return "?";
}

std::string format_report(const LeakReport& r) {
    std::ostringstream os;
    os << "LEAK " << r.proc << " site=" << r.site.str() << " class=" << r.resource_class << " var=" << r.var
       << (r.var_is_temp ? "(temp)" : "") << " last_use=" << r.last_use.str()
       << " handler=" << r.handler_of_last_use.value_or("-");
    for (std::size_t k = 0; k < r.dead_handlers.size(); ++k) os << (k ? "," : " also=") << r.dead_handlers[k];
    return os.str();
}

AnalysisResult analyze_procedure(const ir::ProcDef& proc, const Cfg& cfg, const ResourceConfig& config) {
    return Analyzer(proc, cfg, config).run();
}

std::vector<LeakReport> detect_leaks(const ir::ProcDef& proc, const Cfg& cfg, const ResourceConfig& config) {
    return analyze_procedure(proc, cfg, config).reports;
}

std::vector<LeakReport> detect_leaks(const ir::Program& program, const ResourceConfig& config) {
    std::vector<LeakReport> out;
    for (const auto& p : program.procedures) {
        auto reports = detect_leaks(p, build_cfg(p), config);
        out.insert(out.end(), reports.begin(), reports.end());
    }
    return out;
}

}  // namespace leakfix::analysis
