from ._matchfn import (  # noqa: F401
    ConditionalCdfEstimator,
    DgpConfig,
    ElasticityEstimate,
    EstimationResult,
    KernelConfig,
    MarketDiagnostics,
    MatchfnError,
    MatchingSurface,
    Month,
    OutOfSupportError,
    Panel,
    PanelObservation,
    SyntheticPanel,
    SyntheticTruth,
    ValidationReport,
    compute_diagnostics,
    estimate,
    generate,
    load_panel,
    oracle_report,
    recover_surface,
    validate,
)

__all__ = [name for name in dir() if not name.startswith("_")]
