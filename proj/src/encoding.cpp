#include <rig/encoding.hpp>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rig {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

StepPath StepPath::make(double slope, std::vector<double> times, std::vector<double> sizes, std::vector<int> labels) {
    if (times.size() != sizes.size()) throw std::invalid_argument("jump times and sizes must align");
    if (labels.empty()) labels.assign(times.size(), -1);
    if (labels.size() != times.size()) throw std::invalid_argument("jump labels must align");
    std::vector<std::size_t> idx(times.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
    StepPath p;
    p.slope = slope;
    for (std::size_t i : idx) {
        p.times.push_back(times[i]);
        p.sizes.push_back(sizes[i]);
        p.labels.push_back(labels[i]);
    }
    p.cumulative.resize(p.sizes.size());
    std::partial_sum(p.sizes.begin(), p.sizes.end(), p.cumulative.begin());
    p.prefix_min_left_.resize(p.times.size());
    double best = kInf;
    for (std::size_t i = 0; i < p.times.size(); ++i) {
        double left = slope * p.times[i] + (i == 0 ? 0.0 : p.cumulative[i - 1]);
        best = std::min(best, left);
        p.prefix_min_left_[i] = best;
    }
    return p;
}

double StepPath::value(double t) const {
    auto k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    return slope * t + (k == 0 ? 0.0 : cumulative[k - 1]);
}

double StepPath::left_limit(double t) const {
    auto k = std::lower_bound(times.begin(), times.end(), t) - times.begin();
    return slope * t + (k == 0 ? 0.0 : cumulative[k - 1]);
}

double StepPath::running_infimum(double t) const {
    auto k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    double v = std::min(0.0, value(t));
    if (k > 0) v = std::min(v, prefix_min_left_[k - 1]);
    return v;
}

LambdaPaths lambda_paths(const ExplorationRecord& rec) {
    LambdaPaths out;
    std::vector<int> bl(rec.n), wl(rec.m);
    std::iota(bl.begin(), bl.end(), 0);
    std::iota(wl.begin(), wl.end(), 0);
    out.x = StepPath::make(0.0, rec.clocks.black, rec.x, bl);
    out.y = StepPath::make(0.0, rec.clocks.white, rec.y, wl);
    return out;
}

ZProcess z_process(const ExplorationRecord& rec) {
    ZProcess out;
    std::vector<int> bl(rec.n);
    std::iota(bl.begin(), bl.end(), 0);
    out.queue_load = StepPath::make(-1.0, rec.clocks.black, rec.delta_bi, bl);
    LambdaPaths lam = lambda_paths(rec);
    std::vector<double> comp(rec.n);
    for (int i = 0; i < rec.n; ++i) {
        double e = rec.clocks.black[i];
        comp[i] = lam.y.value(lam.x.value(e)) - lam.y.value(lam.x.left_limit(e));
    }
    out.composition = StepPath::make(-1.0, rec.clocks.black, comp, bl);
    for (std::size_t k = 0; k < out.queue_load.times.size(); ++k) {
        if (out.queue_load.times[k] != out.composition.times[k] || out.queue_load.labels[k] != out.composition.labels[k])
            throw std::logic_error("Z jump times differ between the two constructions");
        out.max_discrepancy =
            std::max(out.max_discrepancy, std::fabs(out.queue_load.sizes[k] - out.composition.sizes[k]));
    }
    if (out.max_discrepancy > 1e-9) throw std::logic_error("Z jump sizes differ between the two constructions");
    return out;
}

int HeightPath::value(double t) const {
    auto k = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    if (k == 0) return 0;
    return times[k - 1] == t ? at[k - 1] : after[k - 1];
}

int HeightPath::min_on(double s, double t) const {
    if (t < s) std::swap(s, t);
    int best = value(s);
    auto k = std::lower_bound(times.begin(), times.end(), s) - times.begin();
    for (auto i = static_cast<std::size_t>(k); i < times.size() && times[i] <= t; ++i) {
        if (times[i] > s) best = std::min(best, at[i]);
        if (times[i] < t) best = std::min(best, after[i]);
    }
    return best;
}

int HeightPath::max_value() const {
    int best = 0;
    for (int v : at) best = std::max(best, v);
    return best;
}

HeightPath height_process(const StepPath& z, HeightRule rule) {
    if (!(z.slope < 0.0)) throw std::invalid_argument("height process needs a strictly negative drift");
    const double rate = -z.slope;
    struct Event {
        double t;
        int jumps = 0;
        int strict_deaths = 0;
        int nonstrict_deaths = 0;
    };
    std::vector<Event> events;
    auto add = [&](double t, int j, int sd, int nd) {
        if (!events.empty() && events.back().t == t) {
            events.back().jumps += j;
            events.back().strict_deaths += sd;
            events.back().nonstrict_deaths += nd;
        } else {
            events.push_back({t, j, sd, nd});
        }
    };
    std::vector<double> levels;  // pre-jump levels of clients still counted
    double last_t = 0.0, last_z = 0.0;
    auto kill_down_to = [&](double limit_t, double left_value) {
        for (;;) {
            if (levels.empty()) return;
            double lvl = levels.back();
            bool dies = rule == HeightRule::NonStrict ? lvl > left_value + kPathTol : lvl >= left_value - kPathTol;
            if (!dies) return;
            double d = std::min(last_t + (last_z - lvl) / rate, limit_t);
            d = std::max(d, last_t);
            levels.pop_back();
            if (rule == HeightRule::NonStrict) add(d, 0, 0, 1);
            else add(d, 0, 1, 0);
        }
    };
    for (std::size_t k = 0; k < z.times.size(); ++k) {
        if (!(z.sizes[k] > 0.0)) continue;
        double t = z.times[k];
        double left = z.left_limit(t);
        kill_down_to(t, left);
        levels.push_back(left);
        add(t, 1, 0, 0);
        last_t = t;
        last_z = z.value(t);
    }
    kill_down_to(kInf, -kInf);

    HeightPath h;
    int current = 0;
    for (const auto& e : events) {
        int at = current + e.jumps - e.strict_deaths;
        int after = at - e.nonstrict_deaths;
        h.times.push_back(e.t);
        h.at.push_back(at);
        h.after.push_back(after);
        current = after;
    }
    return h;
}

std::vector<int> vertex_heights(const ExplorationRecord& rec, const HeightPath& h) {
    std::vector<int> out(rec.n);
    for (int i = 0; i < rec.n; ++i)
        out[i] = 2 * h.value(rec.clocks.black[i]) - 1 + (rec.delta_bi[i] == 0.0 ? 2 : 0);
    return out;
}

int ServiceSchedule::served_at(double t) const {
    auto it = std::upper_bound(segments.begin(), segments.end(), t,
                               [](double v, const ServiceSegment& s) { return v < s.start; });
    if (it == segments.begin()) return -1;
    --it;
    return t < it->end ? it->client : -1;
}

ServiceSchedule service_schedule(const std::vector<double>& arrivals, const std::vector<double>& services) {
    if (arrivals.size() != services.size()) throw std::invalid_argument("arrivals and services must align");
    const std::size_t N = arrivals.size();
    std::vector<int> order(N);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) { return arrivals[a] < arrivals[b]; });
    ServiceSchedule sched;
    sched.departure.assign(N, 0.0);
    std::vector<std::pair<int, double>> stack;
    double now = 0.0;
    auto load = [&]() {
        double s = 0.0;
        for (const auto& e : stack) s += e.second;
        return s;
    };
    auto serve_until = [&](double t) {
        while (!stack.empty()) {
            auto& top = stack.back();
            double finish = now + top.second;
            if (finish <= t) {
                if (finish > now) sched.segments.push_back({now, finish, top.first, load()});
                sched.departure[top.first] = finish;
                now = finish;
                stack.pop_back();
            } else {
                if (t > now) sched.segments.push_back({now, t, top.first, load()});
                top.second = finish - t;
                now = t;
                return;
            }
        }
    };
    for (int i : order) {
        double t = arrivals[i];
        serve_until(t);
        now = t;
        if (services[i] > 0.0) stack.emplace_back(i, services[i]);
        else sched.departure[i] = t;
    }
    serve_until(kInf);
    return sched;
}

TreeDistance tree_distance_via_height(const HeightPath& h, const StepPath& z, double s, double t) {
    if (t < s) std::swap(s, t);
    TreeDistance out;
    if (!(z.reflected(s) > kPathTol) || !(z.reflected(t) > kPathTol)) return out;
    out.served = true;
    if (std::fabs(z.running_infimum(s) - z.running_infimum(t)) > kPathTol) {
        out.distance = kUnreachable;
        return out;
    }
    out.distance = h.value(s) + h.value(t) - 2 * h.min_on(s, t);
    return out;
}

std::vector<ExcursionInterval> excursions(const StepPath& z, const StepPath& lambda_x) {
    std::vector<ExcursionInterval> out;
    double end = -kInf;
    double mass = 0.0;
    for (std::size_t k = 0; k < z.times.size(); ++k) {
        if (!(z.sizes[k] > 0.0)) continue;
        double t = z.times[k];
        if (t >= end) {
            if (!out.empty()) {
                out.back().d = end;
                out.back().y_mass = mass;
            }
            ExcursionInterval e;
            e.g = t;
            e.root = z.labels[k];
            out.push_back(e);
            end = t;
            mass = 0.0;
        }
        end += z.sizes[k];
        mass += z.sizes[k];
    }
    if (!out.empty()) {
        out.back().d = end;
        out.back().y_mass = mass;
    }
    for (auto& e : out) e.x_mass = lambda_x.value(e.d) - lambda_x.left_limit(e.g);
    return out;
}

double SigmaPath::value(double u) const {
    auto k = std::upper_bound(t.begin(), t.end(), u) - t.begin();
    if (k == 0) return 0.0;
    std::size_t i = static_cast<std::size_t>(k - 1);
    if (t[i] == u || i + 1 == t.size()) return right[i];
    double frac = (u - t[i]) / (t[i + 1] - t[i]);
    return right[i] + frac * (left[i + 1] - right[i]);
}

double SigmaPath::left_limit(double u) const {
    auto k = std::lower_bound(t.begin(), t.end(), u) - t.begin();
    if (static_cast<std::size_t>(k) < t.size() && t[k] == u) return left[k];
    return value(u);
}

double SigmaPath::inverse(double s) const {
    std::vector<double> flat;
    flat.reserve(2 * t.size());
    for (std::size_t i = 0; i < t.size(); ++i) {
        flat.push_back(left[i]);
        flat.push_back(right[i]);
    }
    auto p = static_cast<std::size_t>(std::upper_bound(flat.begin(), flat.end(), s) - flat.begin());
    if (p == flat.size()) return kInf;
    std::size_t i = p / 2;
    if (p % 2 == 1 || i == 0) return t[i];
    double frac = (s - right[i - 1]) / (left[i] - right[i - 1]);
    return t[i - 1] + frac * (t[i] - t[i - 1]);
}

SigmaPath sigma_transfer(const ServiceSchedule& sched, const std::vector<double>& x, const std::vector<double>& arrivals,
                         const std::vector<double>& services) {
    std::vector<int> jumps;
    for (std::size_t k = 0; k < services.size(); ++k)
        if (services[k] == 0.0) jumps.push_back(static_cast<int>(k));
    std::sort(jumps.begin(), jumps.end(), [&](int a, int b) { return arrivals[a] < arrivals[b]; });
    SigmaPath sp;
    double cum = 0.0;
    std::size_t j = 0;
    auto knot = [&](double tt, double l, double r) {
        sp.t.push_back(tt);
        sp.left.push_back(l);
        sp.right.push_back(r);
    };
    auto flush_jumps = [&](double upto) {
        while (j < jumps.size() && arrivals[jumps[j]] <= upto) {
            int k = jumps[j++];
            knot(arrivals[k], cum, cum + x[k]);
            cum += x[k];
        }
    };
    for (const auto& seg : sched.segments) {
        flush_jumps(seg.start);
        knot(seg.start, cum, cum);
        cum += x[seg.client] * (seg.end - seg.start) / services[seg.client];
        knot(seg.end, cum, cum);
    }
    flush_jumps(kInf);
    return sp;
}

std::vector<double> sigma_image_measure(const SigmaPath& sigma, const ServiceSchedule& sched,
                                        const std::vector<double>& arrivals, const std::vector<double>& services) {
    std::vector<double> out(services.size(), 0.0);
    for (const auto& seg : sched.segments) out[seg.client] += sigma.left_limit(seg.end) - sigma.value(seg.start);
    for (std::size_t k = 0; k < services.size(); ++k)
        if (services[k] == 0.0) out[k] = sigma.value(arrivals[k]) - sigma.left_limit(arrivals[k]);
    return out;
}

Encoding encode(const ExplorationRecord& rec, HeightRule rule) {
    Encoding e;
    e.lambda = lambda_paths(rec);
    e.z = z_process(rec);
    e.height = height_process(e.z.queue_load, rule);
    e.schedule = service_schedule(rec.clocks.black, rec.delta_bi);
    e.sigma = sigma_transfer(e.schedule, rec.x, rec.clocks.black, rec.delta_bi);
    e.excursions = excursions(e.z.queue_load, e.lambda.x);
    return e;
}

void write_path_csv(std::ostream& os, const std::function<double(double)>& f, double t0, double t1, int samples,
                    const char* name) {
    os << "t," << name << "\n" << std::setprecision(12);
    for (int i = 0; i < samples; ++i) {
        double t = samples == 1 ? t0 : t0 + (t1 - t0) * i / (samples - 1);
        os << t << ',' << f(t) << "\n";
    }
}

}  // namespace rig
