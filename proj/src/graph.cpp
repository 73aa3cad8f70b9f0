#include "autostruct/graph.hpp"

#include <algorithm>
#include <utility>

namespace autostruct {

Sccs strongly_connected(const std::vector<std::vector<std::uint32_t>>& adj) {
    const std::uint32_t n = static_cast<std::uint32_t>(adj.size());
    const std::uint32_t none = ~0u;
    Sccs r;
    r.comp.assign(n, none);
    std::vector<std::uint32_t> index(n, none), low(n, 0), stack;
    std::vector<bool> on(n, false);
    std::vector<std::pair<std::uint32_t, std::size_t>> call;
    std::uint32_t counter = 0;
    for (std::uint32_t root = 0; root < n; ++root) {
        if (index[root] != none) continue;
        call.push_back({root, 0});
        index[root] = low[root] = counter++;
        stack.push_back(root);
        on[root] = true;
        while (!call.empty()) {
            auto& [v, i] = call.back();
            if (i < adj[v].size()) {
                std::uint32_t w = adj[v][i++];
                if (index[w] == none) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    on[w] = true;
                    call.push_back({w, 0});
                } else if (on[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::uint32_t done = v;
            call.pop_back();
            if (!call.empty()) low[call.back().first] = std::min(low[call.back().first], low[done]);
            if (low[done] != index[done]) continue;
            std::uint32_t id = r.count++;
            std::size_t size = 0;
            std::uint32_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on[w] = false;
                r.comp[w] = id;
                ++size;
            } while (w != done);
            bool cyc = size > 1 || std::find(adj[done].begin(), adj[done].end(), done) != adj[done].end();
            r.cyclic.push_back(cyc);
        }
    }
    return r;
}

}  // namespace autostruct
