#ifndef CONCEAL_SRC_SCC_HPP
#define CONCEAL_SRC_SCC_HPP

#include <algorithm>
#include <cstddef>
#include <vector>

namespace conceal::detail {

// Tarjan's algorithm over an adjacency-list graph, iterative so deep chains
// cannot overflow the stack. Components come out in reverse topological
// order; node order inside a component follows stack pop order.
inline std::vector<std::vector<int>> strongly_connected_components(
    const std::vector<std::vector<int>>& graph) {
    const int n = static_cast<int>(graph.size());
    std::vector<int> index(n, -1), lowlink(n, 0);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    std::vector<std::vector<int>> components;
    int next_index = 0;

    struct Frame {
        int node;
        std::size_t edge = 0;
    };
    std::vector<Frame> frames;

    for (int root = 0; root < n; ++root) {
        if (index[root] != -1) continue;
        frames.push_back({root});
        index[root] = lowlink[root] = next_index++;
        stack.push_back(root);
        on_stack[root] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            int v = f.node;
            if (f.edge < graph[v].size()) {
                int w = graph[v][f.edge++];
                if (index[w] == -1) {
                    index[w] = lowlink[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w});
                } else if (on_stack[w]) {
                    lowlink[v] = std::min(lowlink[v], index[w]);
                }
            } else {
                if (lowlink[v] == index[v]) {
                    std::vector<int> component;
                    int w;
                    do {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        component.push_back(w);
                    } while (w != v);
                    components.push_back(std::move(component));
                }
                frames.pop_back();
                if (!frames.empty())
                    lowlink[frames.back().node] =
                        std::min(lowlink[frames.back().node], lowlink[v]);
            }
        }
    }
    return components;
}

// True when the component can sustain an infinite walk: at least two nodes,
// or a single node with a self-loop.
inline bool component_has_cycle(const std::vector<int>& component,
                                const std::vector<std::vector<int>>& graph) {
    if (component.size() > 1) return true;
    int v = component.front();
    return std::find(graph[v].begin(), graph[v].end(), v) != graph[v].end();
}

}  // namespace conceal::detail

#endif
