//! u_L tables, exact ultrametric and 4-point tests, tree hulls and the
//! checks connecting them to the block structure of the dual graph.

mod hull;
mod loglength;
mod metric;
mod theorem;
mod ultra;

pub use hull::{tree_hull, HullEdge, HullNode, HullReport, MetricTreeHull};
pub use loglength::{Length, LogLength};
pub(crate) use metric::min_attained_twice;
pub use metric::{
    family_vertices, four_point_check, is_ultrametric, rho_metric, triangle_violation, u_l_branches, u_l_table,
    u_l_table_vertices, FiniteMetric, FourPointReport, UltraReport,
};
pub use theorem::{
    branch_hull_f_tree, branch_tree, subtle_check, ultram_theorem_check, valblocks_check, vertex_hull_f_tree,
    SubtleReport, UltraTheoremReport, ValBlocksReport,
};
pub use ultra::{ultra_tree, UltraNode, UltraTree, UltraTreeReport};
