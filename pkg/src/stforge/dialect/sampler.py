"""Seeded generator of small, well-typed programs in the supported subset.

Sampled programs are valid by construction under the bundled profile: every
name is declared before use, expression operands stay within one type
family, and every FB instance is invoked.  Round-trip tests, the corpus
builder, and the catalog-aware generation stub all draw from here.
"""

from __future__ import annotations

import random

from .nodes import (
    Assignment, Binary, CallArg, CaseArm, CaseStatement, CompilationUnit,
    DataTypeRef, Expression, FbInvocation, ForStatement, IfBranch,
    IfStatement, Literal, LiteralKind, Pou, PouKind, RepeatStatement,
    Statement, Unary, VarBlock, VarBlockKind, VarDecl, VariableRef,
    WhileStatement,
)
from .parser import time_value_ms
from .printer import pretty_print
from .spans import SourceSpan

_S = SourceSpan.point(1, 1)

_PROGRAM_NAMES = (
    "PumpControl", "TankMonitor", "GateSequence", "MixerUnit", "FeederLine",
    "PressStation", "OvenZone", "LiftControl", "SorterCell", "FillerHead",
    "DryerLoop", "PalletStage", "CoolantWatch", "BlenderStep", "HopperFeed",
)
_BOOL_NAMES = (
    "start_cmd", "stop_cmd", "reset_cmd", "run_state", "fault_flag",
    "sensor_low", "sensor_high", "door_closed", "pump_on", "valve_open",
    "alarm_out", "ready_lamp", "manual_mode", "limit_hit",
)
_INT_NAMES = (
    "step_no", "item_count", "retry_count", "batch_size", "speed_set",
    "target_pos", "cycle_total", "error_code", "level_pct",
)
_REAL_NAMES = ("flow_rate", "temp_value", "scale_gain", "offset_val")
_TIME_NAMES = ("delay_set", "pulse_len", "hold_time")
_ARRAY_NAMES = ("buf_data", "recipe_vals", "log_ring")
_TIMER_FBS = ("TON", "TOF", "TP")
_TIME_LITERALS = ("T#100ms", "T#1s", "T#2s", "T#5s", "T#500ms", "T#1m", "T#1h30m")


class ProgramSampler:
    def __init__(self, seed: int) -> None:
        self.rng = random.Random(seed)

    def sample_source(self) -> str:
        return pretty_print(self.sample_unit())

    def sample_unit(self) -> CompilationUnit:
        pou = self._sample_program()
        return CompilationUnit(pous=[pou], span=_S)

    # -- declarations -----------------------------------------------------

    def _sample_program(self) -> Pou:
        rng = self.rng
        self.bools = list(rng.sample(_BOOL_NAMES, rng.randint(3, 6)))
        self.ints = list(rng.sample(_INT_NAMES, rng.randint(2, 4)))
        self.reals = list(rng.sample(_REAL_NAMES, rng.randint(0, 2)))
        self.times = list(rng.sample(_TIME_NAMES, rng.randint(0, 1)))
        self.arrays = list(rng.sample(_ARRAY_NAMES, rng.randint(0, 1)))
        self.timers = [f"tmr_{i}" for i in range(rng.randint(0, 2))]
        self.edges = [f"edge_{i}" for i in range(rng.randint(0, 2))]
        self.counters = [f"ctr_{i}" for i in range(rng.randint(0, 1))]
        self.loop_var = "ix"

        decls: list[VarDecl] = []
        for name in self.bools:
            decls.append(_decl(name, "BOOL", self._maybe_bool_literal()))
        for name in self.ints:
            decls.append(_decl(name, "INT", self._maybe_int_literal()))
        for name in self.reals:
            decls.append(_decl(name, "REAL", self._maybe_real_literal()))
        for name in self.times:
            text = rng.choice(_TIME_LITERALS)
            decls.append(_decl(name, "TIME", Literal(LiteralKind.TIME, text, time_value_ms(text), _S)))
        for name in self.arrays:
            decls.append(VarDecl(name, DataTypeRef("INT", [(0, rng.choice((4, 9, 15)))], _S), None, _S))
        self.has_loop_var = bool(self.arrays) or rng.random() < 0.6
        if self.has_loop_var:
            decls.append(_decl(self.loop_var, "INT", None))
            self.ints.append(self.loop_var)
        for name in self.timers:
            decls.append(_decl(name, rng.choice(_TIMER_FBS), None))
        for name in self.edges:
            decls.append(_decl(name, rng.choice(("RTRIG", "FTRIG")), None))
        for name in self.counters:
            decls.append(_decl(name, "CTU", None))

        body: list[Statement] = []
        # Instances first so every declared FB is guaranteed an invocation.
        for name in self.timers:
            body.append(FbInvocation(name, [
                CallArg("IN", "in", self._bool_expr(1), _S),
                CallArg("PT", "in", _time_lit(rng.choice(_TIME_LITERALS)), _S),
            ], _S))
        for name in self.edges:
            body.append(FbInvocation(name, [
                CallArg("CLK", "in", self._bool_ref(), _S),
            ], _S))
        for name in self.counters:
            body.append(FbInvocation(name, [
                CallArg("CU", "in", self._bool_ref(), _S),
                CallArg("R", "in", self._bool_ref(), _S),
                CallArg("PV", "in", self._int_literal(), _S),
            ], _S))
        for _ in range(rng.randint(3, 7)):
            body.append(self._statement(depth=0))

        return Pou(
            kind=PouKind.PROGRAM,
            name=rng.choice(_PROGRAM_NAMES),
            return_type=None,
            var_blocks=[VarBlock(VarBlockKind.VAR, decls, _S)],
            body=body,
            span=_S,
        )

    # -- statements ---------------------------------------------------------

    def _statement(self, depth: int) -> Statement:
        rng = self.rng
        choices = ["assign_bool", "assign_int", "if"]
        if self.reals:
            choices.append("assign_real")
        if self.timers or self.edges:
            choices.append("read_member")
        if depth == 0:
            choices.extend(["case", "while", "repeat"])
            if self.has_loop_var:
                choices.append("for")
        pick = rng.choice(choices)

        if pick == "assign_bool":
            return Assignment(self._bool_ref(), self._bool_expr(2), _S)
        if pick == "assign_int":
            return Assignment(self._int_ref(), self._int_expr(2), _S)
        if pick == "assign_real":
            name = rng.choice(self.reals)
            return Assignment(VariableRef(name, span=_S), self._real_expr(), _S)
        if pick == "read_member":
            instance = rng.choice(self.timers + self.edges)
            return Assignment(
                self._bool_ref(),
                VariableRef(instance, members=["Q"], span=_S),
                _S,
            )
        if pick == "if":
            branches = [IfBranch(self._bool_expr(2), self._small_body(depth + 1), _S)]
            if rng.random() < 0.4:
                branches.append(IfBranch(self._bool_expr(1), self._small_body(depth + 1), _S))
            else_body = self._small_body(depth + 1) if rng.random() < 0.5 else []
            return IfStatement(branches, else_body, _S)
        if pick == "case":
            selector = VariableRef(rng.choice(self.ints), span=_S)
            arms = []
            label = 0
            for _ in range(rng.randint(2, 4)):
                if rng.random() < 0.25:
                    labels = [_case_range(label, label + rng.randint(1, 2))]
                    label += 3
                else:
                    labels = [_int_lit(label)]
                    label += 1
                arms.append(CaseArm(labels, self._small_body(depth + 1), _S))
            else_body = self._small_body(depth + 1) if rng.random() < 0.5 else []
            return CaseStatement(selector, arms, else_body, _S)
        if pick == "for":
            target = (
                Assignment(
                    VariableRef(self.arrays[0], indices=[VariableRef(self.loop_var, span=_S)], span=_S),
                    self._int_expr(1), _S)
                if self.arrays else
                Assignment(self._int_ref(), self._int_expr(1), _S)
            )
            return ForStatement(
                self.loop_var, _int_lit(0), _int_lit(rng.choice((4, 9))),
                _int_lit(rng.choice((1, 2))) if rng.random() < 0.3 else None,
                [target], _S,
            )
        if pick == "while":
            return WhileStatement(self._bool_expr(1), self._small_body(depth + 1), _S)
        if pick == "repeat":
            return RepeatStatement(self._small_body(depth + 1), self._bool_expr(1), _S)
        raise AssertionError(pick)

    def _small_body(self, depth: int) -> list[Statement]:
        count = self.rng.randint(1, 2)
        body: list[Statement] = []
        for _ in range(count):
            pick = self.rng.random()
            if pick < 0.5:
                body.append(Assignment(self._bool_ref(), self._bool_expr(1), _S))
            else:
                body.append(Assignment(self._int_ref(), self._int_expr(1), _S))
        return body

    # -- expressions ----------------------------------------------------------

    def _bool_ref(self) -> VariableRef:
        return VariableRef(self.rng.choice(self.bools), span=_S)

    def _int_ref(self) -> VariableRef:
        return VariableRef(self.rng.choice(self.ints), span=_S)

    def _bool_expr(self, depth: int) -> Expression:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.4:
            if rng.random() < 0.15:
                return Literal(LiteralKind.BOOL, "TRUE" if rng.random() < 0.5 else "FALSE",
                               rng.random() < 0.5, _S)
            return self._bool_ref()
        pick = rng.random()
        if pick < 0.25:
            return Unary("NOT", self._bool_expr(depth - 1), _S)
        if pick < 0.55:
            op = rng.choice(("AND", "OR", "XOR"))
            return Binary(op, self._bool_expr(depth - 1), self._bool_expr(depth - 1), _S)
        op = rng.choice(("=", "<>", "<", "<=", ">", ">="))
        return Binary(op, self._int_expr(depth - 1), self._int_expr(depth - 1), _S)

    def _int_expr(self, depth: int) -> Expression:
        rng = self.rng
        if depth <= 0 or rng.random() < 0.5:
            return self._int_literal() if rng.random() < 0.4 else self._int_ref()
        op = rng.choice(("+", "-", "*", "MOD"))
        return Binary(op, self._int_expr(depth - 1), self._int_expr(depth - 1), _S)

    def _real_expr(self) -> Expression:
        rng = self.rng
        lhs: Expression = VariableRef(rng.choice(self.reals), span=_S)
        if rng.random() < 0.5:
            return Binary(rng.choice(("+", "-", "*")), lhs, self._real_literal(), _S)
        return self._real_literal()

    def _int_literal(self) -> Literal:
        return _int_lit(self.rng.randint(0, 100))

    def _maybe_int_literal(self) -> Literal | None:
        return self._int_literal() if self.rng.random() < 0.5 else None

    def _real_literal(self) -> Literal:
        text = f"{self.rng.randint(0, 99)}.{self.rng.randint(0, 9)}"
        return Literal(LiteralKind.REAL, text, float(text), _S)

    def _maybe_real_literal(self) -> Literal | None:
        return self._real_literal() if self.rng.random() < 0.5 else None

    def _maybe_bool_literal(self) -> Literal | None:
        if self.rng.random() < 0.3:
            value = self.rng.random() < 0.5
            return Literal(LiteralKind.BOOL, "TRUE" if value else "FALSE", value, _S)
        return None


def _decl(name: str, type_name: str, initializer: Expression | None) -> VarDecl:
    return VarDecl(name, DataTypeRef(type_name, None, _S), initializer, _S)


def _time_lit(text: str) -> Literal:
    return Literal(LiteralKind.TIME, text, time_value_ms(text), _S)


def _int_lit(value: int) -> Literal:
    return Literal(LiteralKind.INT, str(value), value, _S)


def _case_range(low: int, high: int):
    from .nodes import CaseRange
    return CaseRange(_int_lit(low), _int_lit(high), _S)


def sample_program(seed: int) -> str:
    """Source text of one sampled program."""
    return ProgramSampler(seed).sample_source()
