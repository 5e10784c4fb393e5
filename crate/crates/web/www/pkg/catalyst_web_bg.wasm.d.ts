/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_landscape_free: (a: number, b: number) => void;
export const __wbg_trajectory_free: (a: number, b: number) => void;
export const alpha_envelope: (a: number) => [number, number];
export const landscape_adapted_kappa: (a: number, b: number, c: number, d: number, e: number) => [number, number];
export const landscape_grid: (a: number, b: number, c: number) => [number, number];
export const landscape_new: (a: number, b: number, c: number, d: number, e: number) => [number, number, number];
export const landscape_run: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => number;
export const landscape_value: (a: number, b: number, c: number) => number;
export const trajectory_accel_points: (a: number) => [number, number];
export const trajectory_error: (a: number) => [number, number];
export const trajectory_iterates: (a: number) => [number, number];
export const trajectory_kappas: (a: number) => [number, number];
export const trajectory_prox_points: (a: number) => [number, number];
export const trajectory_values: (a: number) => [number, number];
export const trajectory_winners: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_start: () => void;
