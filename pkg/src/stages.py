import logging
import operator
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Annotated, Any, Dict, List, Tuple

import pandas as pd
from typing_extensions import TypedDict

from src.config import PipelineConfig
from src.diagnostics import diagnostics, posterior_summary
from src.errors import ConfigError, DataContractError, MissingStageInputError, SamplingError
from src.evaluation import (
    EvalReport,
    compare_grouping,
    emit_plot_data,
    score_on_train,
    split,
    variance_decomposition,
)
from src.hier import HierData, run_mcmc
from src.ingest import filter_usable, group_by_location_day, parse_transactions, reconcile_minutes_open
from src.localfit import build_coefficient_dataset, reduction_ratio, rescale_for_inference
from src import storage
from src.schema import COEFFICIENTS, GROUPINGS, CoefficientRecord, SamplerConfig
from src.synthgen import generate_dataset

logger = logging.getLogger("hiercast.stages")

TRANSACTIONS = "transactions.csv"
GROUND_TRUTH = "ground_truth.json"
REJECTIONS = "rejections.csv"
DROPPED = "dropped_days.csv"
BINNED_DIR = "binned"
BIN_REPORT = "bin_report.json"
COEFFICIENTS_CSV = "coefficients.csv"
FIT_FAILURES = "fit_failures.csv"
FIT_REPORT = "fit_report.json"
SPLIT = "split.csv"
EVAL_REPORT = "eval_report.json"
RMSE_TABLE = "rmse_table.csv"
PLOTS_DIR = "plots"


def draws_file(c: str) -> str:
    return f"draws_{c}.csv"


def summary_file(c: str) -> str:
    return f"summary_{c}.csv"


def diagnostics_file(c: str) -> str:
    return f"diagnostics_{c}.json"


def hier_data_file(c: str) -> str:
    return f"hier_data_{c}.csv"


HIER_DATA_LABEL = "y"


def failure_file(c: str) -> str:
    return f"infer_failure_{c}.json"


def merge_outputs(old: Dict[str, Any], new: Dict[str, Any]) -> Dict[str, Any]:
    return {**(old or {}), **(new or {})}


class StageState(TypedDict):
    plan: List[str]
    completed: Annotated[List[str], operator.add]
    outputs: Annotated[Dict[str, Any], merge_outputs]


@dataclass
class StageResult:
    summary: Dict[str, Any]
    inputs: List[Path] = field(default_factory=list)
    outputs: List[Path] = field(default_factory=list)


class BaseStage:
    name = "stage"

    def __init__(self, cfg: PipelineConfig):
        self.cfg = cfg
        self.out = Path(cfg.out_dir)

    def path(self, name: str) -> Path:
        return self.out / name

    def require(self, name: str, producer: str) -> Path:
        p = self.path(name)
        if not p.exists():
            raise MissingStageInputError(str(p), producer)
        return p

    def run(self) -> StageResult:
        raise NotImplementedError

    def __call__(self, state: StageState) -> Dict[str, Any]:
        logger.info(f"Stage '{self.name}' starting")
        self.out.mkdir(parents=True, exist_ok=True)
        result = self.run()
        storage.Manifest(self.out).record(
            self.name,
            config=self.cfg.canonical(),
            config_hash=self.cfg.config_hash(),
            seeds=self.cfg.seeds(),
            inputs=result.inputs,
            outputs=result.outputs,
        )
        logger.info(f"Stage '{self.name}' finished: {result.summary}")
        return {"completed": [self.name], "outputs": {self.name: result.summary}}


class GenerateStage(BaseStage):
    name = "generate"

    def run(self) -> StageResult:
        if not self.cfg.synthetic:
            raise ConfigError(["generate runs in synthetic mode only; unset input_csv"])
        truth = self.cfg.ground_truth()
        records = generate_dataset(self.cfg.sim, truth)
        tx, gt = self.path(TRANSACTIONS), self.path(GROUND_TRUTH)
        n = storage.write_transactions_csv(tx, records)
        storage.write_json(gt, truth)
        return StageResult(summary={"transactions": n}, outputs=[tx, gt])


class BinStage(BaseStage):
    name = "bin"

    def source(self) -> Path:
        if self.cfg.input_csv is not None:
            return Path(self.cfg.input_csv)
        return self.require(TRANSACTIONS, "generate")

    def run(self) -> StageResult:
        source = self.source()
        parsed = parse_transactions(source, case_insensitive=self.cfg.case_insensitive_header)
        accepted, conflicts = reconcile_minutes_open(parsed.records, parsed.rows)
        rejected = sorted(parsed.rejections + conflicts, key=lambda r: r.row)
        groups = group_by_location_day(accepted, bin_width=self.cfg.bin_width)
        usable, dropped = filter_usable(groups, self.cfg.min_events_per_day)

        items_in = sum(r.quantity for r in accepted)
        items_binned = sum(s.total for s in groups.values())
        if items_in != items_binned:
            raise DataContractError(f"Binning lost items: {items_in} in, {items_binned} binned")

        rejections, dropped_path = self.path(REJECTIONS), self.path(DROPPED)
        storage.write_rejections(rejections, rejected)
        storage.write_frame(
            dropped_path,
            pd.DataFrame(
                [(k[0], k[1].isoformat(), groups[k].n_events) for k in dropped],
                columns=["LocationNumber", "Day", "n_events"],
            ),
        )
        shards = storage.write_binned(self.path(BINNED_DIR), usable)

        report = {
            "rows": parsed.n_rows,
            "accepted": len(accepted),
            "rejected": len(rejected),
            "items": items_in,
            "location_days": len(groups),
            "usable_location_days": len(usable),
            "transactions_in_usable_days": sum(s.n_events for s in usable.values()),
        }
        report_path = self.path(BIN_REPORT)
        storage.write_json(report_path, report)
        return StageResult(summary=report, inputs=[source], outputs=[rejections, dropped_path, report_path, *shards])


class FitStage(BaseStage):
    name = "fit"

    def run(self) -> StageResult:
        binned = self.require(BINNED_DIR, "bin")
        shards = storage.binned_shards(binned)
        groups = storage.read_binned(binned, self.cfg.bin_width)
        opts = self.cfg.fit
        records, failures = build_coefficient_dataset(groups, opts.epsilon, opts.centering, opts.workers)

        coef_path, fail_path = self.path(COEFFICIENTS_CSV), self.path(FIT_FAILURES)
        storage.write_coefficients(coef_path, records)
        storage.write_fit_failures(fail_path, failures)

        report: Dict[str, Any] = {"records": len(records), "failures": len(failures)}
        inputs = list(shards)
        bin_report = self.path(BIN_REPORT)
        if bin_report.exists():
            inputs.append(bin_report)
            n_tx = storage.read_json(bin_report)["accepted"]
            report["reduction_ratio"] = reduction_ratio(len(records), n_tx)
            logger.info(f"Coefficient dataset is {100 * report['reduction_ratio']:.2f}% of the transaction volume")
        report_path = self.path(FIT_REPORT)
        storage.write_json(report_path, report)
        return StageResult(summary=report, inputs=inputs, outputs=[coef_path, fail_path, report_path])


class InferStage(BaseStage):
    """Splits the coefficient dataset and fits one model per coefficient on the train half.

    With `hier_data_csv` set it samples that HierData file alone and writes the
    `*_y` artifacts instead.
    """

    name = "infer"

    def _sample(
        self, label: str, data: HierData, sampler: SamplerConfig, extra: Dict[str, Any]
    ) -> Tuple[List[Path], Dict[str, Any]]:
        try:
            draws = run_mcmc(data, sampler)
        except SamplingError as e:
            dump_path = self.path(failure_file(label))
            storage.write_json(dump_path, {"coefficient": label, "error": str(e), "dump": e.dump})
            logger.error(f"Sampling {label} failed; diagnostic dump written to {dump_path}")
            raise

        report = diagnostics(draws)
        paths = [self.path(name) for name in (draws_file(label), summary_file(label), diagnostics_file(label))]
        storage.write_draws(paths[0], draws)
        storage.write_frame(paths[1], posterior_summary(draws))
        storage.write_json(
            paths[2],
            {
                "coefficient": label,
                **extra,
                "n": data.n,
                "n_days": data.n_days,
                "n_locations": data.n_locations,
                "diagnostics": report.model_dump(mode="json"),
            },
        )
        return paths, {"converged": report.converged, "flagged": len(report.flagged), "lp_mean": report.lp_mean}

    def _infer_one(self, coefficient: str, train: List[CoefficientRecord]) -> Tuple[List[Path], Dict[str, Any]]:
        scaled = rescale_for_inference(train, coefficient)
        data = HierData.from_records(train, scaled.y)
        hier_path = self.path(hier_data_file(coefficient))
        storage.write_hier_data(hier_path, data)
        paths, summary = self._sample(
            coefficient,
            data,
            self.cfg.sampler_for(coefficient),
            {"scale_factor": scaled.scale_factor, "scale_fallback": scaled.fallback},
        )
        return [hier_path, *paths], summary

    def _run_hier_data(self, source: Path) -> StageResult:
        data = storage.read_hier_data(source)
        logger.info(f"Sampling {data.n} observations from {source}")
        paths, summary = self._sample(
            HIER_DATA_LABEL, data, self.cfg.sampler, {"scale_factor": 1.0, "scale_fallback": False}
        )
        return StageResult(summary={"n": data.n, HIER_DATA_LABEL: summary}, inputs=[source], outputs=paths)

    def run(self) -> StageResult:
        if self.cfg.hier_data_csv is not None:
            return self._run_hier_data(Path(self.cfg.hier_data_csv))

        coef_path = self.require(COEFFICIENTS_CSV, "fit")
        records = storage.read_coefficients(coef_path)
        assignment = split(records, self.cfg.split_seed)
        split_path = self.path(SPLIT)
        storage.write_split(split_path, assignment.labels)
        train = assignment.train(records)

        with ThreadPoolExecutor(max_workers=len(COEFFICIENTS)) as pool:
            futures = {c: pool.submit(self._infer_one, c, train) for c in COEFFICIENTS}
            results = {c: f.result() for c, f in futures.items()}

        outputs = [split_path] + [p for c in COEFFICIENTS for p in results[c][0]]
        summary = {"train": len(train), "test": len(records) - len(train)}
        summary.update({c: results[c][1] for c in COEFFICIENTS})
        return StageResult(summary=summary, inputs=[coef_path], outputs=outputs)


class EvalStage(BaseStage):
    name = "eval"

    def _daily_fit_examples(self, inputs: List[Path]) -> List[Path]:
        binned = self.path(BINNED_DIR)
        n = self.cfg.eval.daily_fit_examples
        if n == 0 or not binned.exists():
            logger.info("Skipping daily_fit plot data")
            return []
        inputs += storage.binned_shards(binned)
        groups = storage.read_binned(binned, self.cfg.bin_width)
        paths = []
        for key in sorted(groups)[:n]:
            frame = emit_plot_data(
                "daily_fit", series=groups[key], epsilon=self.cfg.fit.epsilon, centering=self.cfg.fit.centering
            )
            p = self.path(f"{PLOTS_DIR}/daily_fit_{key[0]}_{key[1].isoformat()}.csv")
            storage.write_frame(p, frame)
            paths.append(p)
        return paths

    def run(self) -> StageResult:
        coef_path = self.require(COEFFICIENTS_CSV, "fit")
        split_path = self.require(SPLIT, "infer")
        inputs = [coef_path, split_path]
        for c in COEFFICIENTS:
            inputs += [self.require(summary_file(c), "infer"), self.require(diagnostics_file(c), "infer")]

        records = storage.read_coefficients(coef_path)
        labels = storage.read_split(split_path)
        train = [r for r in records if labels.get(r.key) == "train"]
        test = [r for r in records if labels.get(r.key) == "test"]
        per_record = self.cfg.eval.per_record

        storage.clear_directory(self.path(PLOTS_DIR))
        report = EvalReport(split_seed=self.cfg.split_seed, per_record=per_record, n_train=len(train), n_test=len(test))
        outputs: List[Path] = []
        for c in COEFFICIENTS:
            summary = storage.read_summary(self.path(summary_file(c)))
            scale = storage.read_json(self.path(diagnostics_file(c)))["scale_factor"]
            report.variance[c] = variance_decomposition(summary, rescale_for_inference(train, c).y, scale)
            for g in GROUPINGS:
                comparison = compare_grouping(summary, train, test, c, g, scale, per_record=per_record)
                report.rows.append(comparison.row)
                report.test_on_train.append(score_on_train(summary, train, c, g, scale))

                pva = self.path(f"{PLOTS_DIR}/pred_vs_actual_{c}_{g}.csv")
                box = self.path(f"{PLOTS_DIR}/boxplot_by_group_{c}_{g}.csv")
                storage.write_frame(pva, emit_plot_data("pred_vs_actual", pairs=comparison.pairs))
                storage.write_frame(box, emit_plot_data("boxplot_by_group", records=test, coefficient=c, grouping=g))
                outputs += [pva, box]

        fit_report = self.path(FIT_REPORT)
        if fit_report.exists():
            inputs.append(fit_report)
            report.reduction_ratio = storage.read_json(fit_report).get("reduction_ratio")

        outputs += self._daily_fit_examples(inputs)
        report_path, table_path = self.path(EVAL_REPORT), self.path(RMSE_TABLE)
        storage.write_json(report_path, report)
        storage.write_frame(table_path, report.rmse_table())
        summary = {f"{r.coefficient}/{r.grouping}": (round(r.baseline_rmse, 6), round(r.hier_rmse, 6)) for r in report.rows}
        return StageResult(summary=summary, inputs=inputs, outputs=[report_path, table_path, *outputs])
