#include "riemlap/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace riemlap {

namespace {

struct Cell {
  int i, j;
  std::int64_t flow;
};

class TransportSimplex {
 public:
  TransportSimplex(const Mat& cost, const std::vector<std::int64_t>& supply,
                   const std::vector<std::int64_t>& demand)
      : c_(cost),
        n_(static_cast<int>(supply.size())),
        m_(static_cast<int>(demand.size())),
        row_cells_(n_),
        col_cells_(m_),
        u_(n_),
        v_(m_) {
    if (cost.rows() != n_ || cost.cols() != m_)
      throw std::invalid_argument("transport_simplex: cost shape mismatch");
    const std::int64_t sa = std::accumulate(supply.begin(), supply.end(), std::int64_t{0});
    const std::int64_t sb = std::accumulate(demand.begin(), demand.end(), std::int64_t{0});
    if (sa != sb) throw std::invalid_argument("transport_simplex: unbalanced supply/demand");
    for (auto s : supply)
      if (s <= 0) throw std::invalid_argument("transport_simplex: supplies must be positive");
    for (auto d : demand)
      if (d <= 0) throw std::invalid_argument("transport_simplex: demands must be positive");
    northwest_corner(supply, demand);
    eps_ = 1e-11 * std::max(1.0, c_.cwiseAbs().maxCoeff());
  }

  double solve() {
    compute_potentials();
    const long arcs = static_cast<long>(n_) * m_;
    const int block = static_cast<int>(std::max<long>(64, std::lround(std::sqrt(double(arcs)))));
    long scan_pos = 0;
    const long bland_after = 64L * (n_ + m_ + 64);
    long pivots = 0;

    while (true) {
      int ei = -1, ej = -1;
      if (pivots < bland_after) {
        find_entering_block(block, scan_pos, ei, ej);
      } else {
        find_entering_bland(ei, ej);  // guarantees finite termination
      }
      if (ei < 0) break;
      pivot(ei, ej);
      compute_potentials();
      ++pivots;
    }

    double total = 0.0;
    for (const Cell& cell : cells_) total += static_cast<double>(cell.flow) * c_(cell.i, cell.j);
    return total;
  }

 private:
  void add_cell(int i, int j, std::int64_t flow) {
    const int id = static_cast<int>(cells_.size());
    cells_.push_back({i, j, flow});
    row_cells_[i].push_back(id);
    col_cells_[j].push_back(id);
  }

  void remove_cell(int id) {
    auto drop = [id](std::vector<int>& list) {
      list.erase(std::find(list.begin(), list.end(), id));
    };
    drop(row_cells_[cells_[id].i]);
    drop(col_cells_[cells_[id].j]);
    const int last = static_cast<int>(cells_.size()) - 1;
    if (id != last) {
      drop(row_cells_[cells_[last].i]);
      drop(col_cells_[cells_[last].j]);
      cells_[id] = cells_[last];
      row_cells_[cells_[id].i].push_back(id);
      col_cells_[cells_[id].j].push_back(id);
    }
    cells_.pop_back();
  }

  void northwest_corner(const std::vector<std::int64_t>& supply,
                        const std::vector<std::int64_t>& demand) {
    int i = 0, j = 0;
    std::int64_t rema = supply[0], remb = demand[0];
    while (true) {
      const std::int64_t f = std::min(rema, remb);
      add_cell(i, j, f);
      rema -= f;
      remb -= f;
      if (i == n_ - 1 && j == m_ - 1) break;
      if (rema == 0 && i < n_ - 1) {
        ++i;
        rema = supply[i];
      } else {
        ++j;
        remb = demand[j];
      }
    }
  }

  // BFS over the spanning tree: u_i + v_j = c_ij on basic cells.
  void compute_potentials() {
    visited_rows_.assign(n_, false);
    visited_cols_.assign(m_, false);
    stack_.clear();
    u_[0] = 0.0;
    visited_rows_[0] = true;
    stack_.push_back(0);  // encode rows as id, cols as id + n_
    while (!stack_.empty()) {
      const int node = stack_.back();
      stack_.pop_back();
      if (node < n_) {
        for (int id : row_cells_[node]) {
          const int j = cells_[id].j;
          if (!visited_cols_[j]) {
            visited_cols_[j] = true;
            v_[j] = c_(node, j) - u_[node];
            stack_.push_back(j + n_);
          }
        }
      } else {
        const int j = node - n_;
        for (int id : col_cells_[j]) {
          const int i = cells_[id].i;
          if (!visited_rows_[i]) {
            visited_rows_[i] = true;
            u_[i] = c_(i, j) - v_[j];
            stack_.push_back(i);
          }
        }
      }
    }
  }

  void find_entering_block(int block, long& scan_pos, int& ei, int& ej) const {
    const long arcs = static_cast<long>(n_) * m_;
    double best = -eps_;
    long scanned = 0;
    while (scanned < arcs) {
      const long stop = std::min<long>(scanned + block, arcs);
      for (; scanned < stop; ++scanned) {
        const long a = (scan_pos + scanned) % arcs;
        const int i = static_cast<int>(a / m_);
        const int j = static_cast<int>(a % m_);
        const double r = c_(i, j) - u_[i] - v_[j];
        if (r < best) {
          best = r;
          ei = i;
          ej = j;
        }
      }
      if (ei >= 0) break;  // best candidate in the first non-empty block
    }
    scan_pos = (scan_pos + scanned) % arcs;
  }

  void find_entering_bland(int& ei, int& ej) const {
    for (int i = 0; i < n_; ++i) {
      for (int j = 0; j < m_; ++j) {
        if (c_(i, j) - u_[i] - v_[j] < -eps_) {
          ei = i;
          ej = j;
          return;
        }
      }
    }
  }

  // Unique tree path from row ei to column ej; parent_ stores the cell used
  // to reach each node.
  void find_cycle(int ei, int ej, std::vector<int>& path_cells) const {
    std::vector<int> parent_cell(n_ + m_, -1);
    std::vector<int> parent_node(n_ + m_, -1);
    std::vector<char> seen(n_ + m_, 0);
    std::vector<int> queue;
    queue.push_back(ei);
    seen[ei] = 1;
    for (size_t qh = 0; qh < queue.size(); ++qh) {
      const int node = queue[qh];
      if (node == n_ + ej) break;
      if (node < n_) {
        for (int id : row_cells_[node]) {
          const int nxt = n_ + cells_[id].j;
          if (!seen[nxt]) {
            seen[nxt] = 1;
            parent_cell[nxt] = id;
            parent_node[nxt] = node;
            queue.push_back(nxt);
          }
        }
      } else {
        for (int id : col_cells_[node - n_]) {
          const int nxt = cells_[id].i;
          if (!seen[nxt]) {
            seen[nxt] = 1;
            parent_cell[nxt] = id;
            parent_node[nxt] = node;
            queue.push_back(nxt);
          }
        }
      }
    }
    path_cells.clear();
    int node = n_ + ej;
    while (node != ei) {
      path_cells.push_back(parent_cell[node]);
      node = parent_node[node];
    }
    std::reverse(path_cells.begin(), path_cells.end());  // now runs ei -> ej
  }

  void pivot(int ei, int ej) {
    std::vector<int> path;
    find_cycle(ei, ej, path);
    // entering arc takes +delta; cells along the path from ei alternate -,+
    std::int64_t delta = std::numeric_limits<std::int64_t>::max();
    int leaving = -1;
    for (size_t k = 0; k < path.size(); k += 2) {
      const Cell& cell = cells_[path[k]];
      const std::int64_t f = cell.flow;
      const long long arc_id = static_cast<long long>(cell.i) * m_ + cell.j;
      if (f < delta ||
          (f == delta && leaving >= 0 &&
           arc_id < static_cast<long long>(cells_[leaving].i) * m_ + cells_[leaving].j)) {
        delta = f;
        leaving = path[k];
      }
    }
    for (size_t k = 0; k < path.size(); ++k) {
      cells_[path[k]].flow += (k % 2 == 0) ? -delta : delta;
    }
    remove_cell(leaving);
    add_cell(ei, ej, delta);
  }

  const Mat& c_;
  int n_, m_;
  std::vector<Cell> cells_;
  std::vector<std::vector<int>> row_cells_, col_cells_;
  std::vector<double> u_, v_;
  std::vector<char> visited_rows_, visited_cols_;
  std::vector<int> stack_;
  double eps_ = 1e-12;
};

}  // namespace

double transport_simplex(const Mat& cost, const std::vector<std::int64_t>& supply,
                         const std::vector<std::int64_t>& demand) {
  TransportSimplex solver(cost, supply, demand);
  return solver.solve();
}

}  // namespace riemlap
