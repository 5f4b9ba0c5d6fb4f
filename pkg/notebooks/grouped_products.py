"""
Products through grouped matrices
=================================

A block-stable matrix can be summarised by the row sums of its blocks.
Multiplying the summaries gives the summary of the product.
"""
from pathlib import Path

from gmethod import io
from gmethod.chains import grouped_product, stable_rows
from gmethod.partitions import Partition, singletons
from gmethod.stable import coarsest_stable_partition, grouped, is_block_stable

DATA = Path(__file__).resolve().parent.parent / "testdata"

P = io.parse_matrix(io.load_json(DATA / "grouping/mixed_4x5.json"))
print(P)

rows = Partition.from_blocks([[1, 2], [3, 4]])
cols = Partition.from_blocks([[1, 2], [3, 4, 5]])
print(is_block_stable(P, rows, cols).describe())
print(grouped(P, rows, cols).matrix)

# with singleton columns the first two rows part ways
print(is_block_stable(P, rows, singletons(5)).describe())

# the coarsest row partition that works for these columns
print(coarsest_stable_partition(P, cols))

# a chain of three 4x4 stochastic factors, kept columns 1..4
chain, kept = io.parse_chain(io.load_json(DATA / "product/three_factors.json"))
for b, g in enumerate(chain.factor_grouped(), start=1):
    print(b, g.row_labels, "->", g.col_labels)
print(grouped_product(chain).matrix)

cert = stable_rows(chain, kept)
print("common row:", cert.stable_row, "checked against direct product:", cert.verified)
