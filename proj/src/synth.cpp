#include "clickgraph/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <random>

#include "clickgraph/error.hpp"
#include "clickgraph/pipeline.hpp"
#include "parallel.hpp"

namespace clickgraph {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// mt19937_64's output sequence is fixed by the standard; the helpers below
// avoid the implementation-defined std distributions so results match across
// standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // (0, 1]
  double unit() { return static_cast<double>((engine_() >> 11) + 1) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

template <typename T>
void shuffle(std::vector<T>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng.below(i)]);
}

}  // namespace

bool Fsa::has_edge(const StateId& from, const StateId& to) const {
  return std::binary_search(edges.begin(), edges.end(), TransitEdge{from, to});
}

Fsa generate_fsa(std::size_t n_states, std::size_t n_edges, std::uint64_t seed) {
  if (n_states == 0 || n_edges < n_states || n_edges > n_states * n_states) {
    throw Error(ErrorCode::InfeasibleParameters,
                "need 1 <= states <= edges <= states^2, got " + std::to_string(n_states) +
                    " states and " + std::to_string(n_edges) + " edges");
  }
  Rng rng(splitmix64(seed));
  Fsa fsa;
  for (std::size_t i = 0; i < n_states; ++i) fsa.states.push_back("S" + std::to_string(i));

  const std::size_t n = n_states;
  std::vector<bool> taken(n * n, false);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen;

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  shuffle(order, rng);
  for (std::size_t i = 0; i < n; ++i) {
    const std::uint32_t a = order[i];
    const std::uint32_t b = order[(i + 1) % n];
    taken[a * n + b] = true;
    chosen.emplace_back(a, b);
  }

  std::vector<std::uint32_t> rest;
  for (std::uint32_t k = 0; k < n * n; ++k) {
    if (!taken[k]) rest.push_back(k);
  }
  shuffle(rest, rng);
  rest.resize(n_edges - n);
  for (std::uint32_t k : rest) {
    chosen.emplace_back(k / static_cast<std::uint32_t>(n), k % static_cast<std::uint32_t>(n));
  }

  fsa.successors.assign(n, {});
  for (auto [a, b] : chosen) {
    fsa.successors[a].push_back(b);
    fsa.edges.push_back({fsa.states[a], fsa.states[b]});
  }
  for (auto& succ : fsa.successors) shuffle(succ, rng);
  std::sort(fsa.edges.begin(), fsa.edges.end());
  return fsa;
}

namespace {

std::size_t sample_length(Rng& rng, const LengthDistribution& dist) {
  if (dist.mean <= 1.0) return 1;
  const double p = 1.0 / dist.mean;
  const double k = 1.0 + std::floor(std::log(rng.unit()) / std::log1p(-p));
  return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(std::max<std::size_t>(dist.max, 1))));
}

std::string padded(char prefix, std::size_t n, int width) {
  std::string digits = std::to_string(n);
  if (static_cast<int>(digits.size()) < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

Walk generate_walk(const Fsa& fsa, const WalkOptions& opt, std::size_t index) {
  Rng rng(splitmix64(opt.seed ^ splitmix64(index + 1)));
  const std::size_t length = sample_length(rng, opt.length);

  Walk w;
  w.drive_id = padded('d', index, 6);
  w.vehicle_id = padded('v', index / std::max<std::size_t>(1, opt.drives_per_vehicle), 5);
  w.app_id = opt.app_id;
  const Instant start = std::chrono::sys_days{std::chrono::year{2024} / 1 / 1} +
                        std::chrono::minutes{index};

  const std::size_t n = fsa.states.size();
  std::uint32_t state = rng.unit() <= opt.reuse_skew ? 0u : static_cast<std::uint32_t>(rng.below(n));

  // taken[state][slot]: times the walk used successors[state][slot] so far.
  std::vector<std::vector<std::uint32_t>> taken(n);
  std::vector<std::uint32_t> ranked;
  std::vector<double> weights;
  for (std::size_t step = 0; step < length; ++step) {
    w.vertices.push_back(fsa.states[state]);
    w.timestamps.push_back(start + std::chrono::seconds{2 * step});
    if (step + 1 == length) break;

    const auto& succ = fsa.successors[state];
    if (succ.empty()) {
      throw Error(ErrorCode::DeadEnd, "state " + fsa.states[state] + " has no successors");
    }
    auto& counts = taken[state];
    if (counts.empty()) counts.assign(succ.size(), 0);
    std::size_t slot;
    if (rng.unit() <= opt.reuse_skew) {
      ranked.resize(succ.size());
      std::iota(ranked.begin(), ranked.end(), 0u);
      std::stable_sort(ranked.begin(), ranked.end(),
                       [&](std::uint32_t x, std::uint32_t y) { return counts[x] > counts[y]; });
      weights.resize(ranked.size());
      double total = 0.0;
      for (std::size_t r = 0; r < ranked.size(); ++r) {
        weights[r] = 1.0 / std::pow(static_cast<double>(r + 1), opt.zipf_exponent);
        total += weights[r];
      }
      double u = rng.unit() * total;
      std::size_t r = 0;
      while (r + 1 < ranked.size() && u > weights[r]) u -= weights[r++];
      slot = ranked[r];
    } else {
      slot = rng.below(succ.size());
    }
    ++counts[slot];
    const std::uint32_t next = succ[slot];
    state = next;
  }
  return w;
}

}  // namespace

std::vector<Walk> generate_walks(const Fsa& fsa, const WalkOptions& options) {
  if (!(options.reuse_skew >= 0.0 && options.reuse_skew <= 1.0)) {
    throw Error(ErrorCode::InfeasibleParameters, "reuse_skew must lie in [0, 1]");
  }
  if (fsa.states.empty()) throw Error(ErrorCode::InfeasibleParameters, "FSA has no states");
  std::vector<Walk> walks(options.n_walks);
  detail::parallel_for(options.n_walks,
                       [&](std::size_t i) { walks[i] = generate_walk(fsa, options, i); });
  return walks;
}

std::vector<std::size_t> default_checkpoints(std::size_t n_walks) {
  std::vector<std::size_t> out;
  if (n_walks == 0) return out;
  for (std::size_t k = 1; k <= 10; ++k) out.push_back(std::max<std::size_t>(1, n_walks * k / 10));
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<ConvergencePoint> convergence_report(const std::vector<Walk>& walks,
                                                 std::vector<std::size_t> checkpoints) {
  std::vector<ConvergencePoint> rows;
  if (walks.empty()) return rows;
  for (auto& c : checkpoints) c = std::min(c, walks.size());
  std::sort(checkpoints.begin(), checkpoints.end());
  checkpoints.erase(std::unique(checkpoints.begin(), checkpoints.end()), checkpoints.end());

  ComponentStore store;
  std::size_t done = 0;
  for (std::size_t target : checkpoints) {
    if (target > done) {
      const std::vector<Walk> batch(walks.begin() + static_cast<std::ptrdiff_t>(done),
                                    walks.begin() + static_cast<std::ptrdiff_t>(target));
      ingest_walks(store, batch);
      done = target;
    }
    const StoreStatistics s = store.statistics();
    ConvergencePoint p;
    p.walks_ingested = done;
    p.distinct_components = s.n_distinct_cycles + s.n_distinct_paths;
    p.occurrences = s.n_occurrences;
    p.distinct_per_occurrence =
        s.n_occurrences == 0 ? 0.0
                             : static_cast<double>(p.distinct_components) / static_cast<double>(s.n_occurrences);
    p.stored_bytes = s.stored_bytes;
    p.raw_bytes = s.raw_bytes;
    rows.push_back(p);
  }
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergencePoint>& rows) {
  out << "walks_ingested,distinct_components,occurrences,distinct_per_occurrence,stored_bytes,"
         "raw_bytes\n";
  for (const auto& r : rows) {
    out << r.walks_ingested << ',' << r.distinct_components << ',' << r.occurrences << ','
        << r.distinct_per_occurrence << ',' << r.stored_bytes << ',' << r.raw_bytes << '\n';
  }
}

}  // namespace clickgraph
