"""Rare high-utility sequential rule mining and rule-based outlier scoring."""

from .miner import (
    Count,
    MiningParams,
    RhusrSet,
    RuleCountMatrix,
    Telemetry,
    UtilityTable,
    build_rcm,
    build_utility_table,
    extend_utility_table,
    generate_initial_rules,
    mine,
    prune_items_by_seu,
)
from .oracle import enumerate_rules, oracle_detect, oracle_mine
from .outlier import OutlierParams, OutlierReport, deviation_factor, detect
from .rules import (
    RuleMeasures,
    SequentialRule,
    expansion_sets,
    measures,
    occurs_in,
    rule_utility_in_seq,
    sids_of_itemset,
)
from .seqdb import (
    ParseError,
    QItem,
    QSequence,
    SequenceDatabase,
    SidSet,
    compute_item_stats,
    item_utility,
    parse_database,
    project_database,
    sequence_utility,
)

__version__ = "0.1.0"
