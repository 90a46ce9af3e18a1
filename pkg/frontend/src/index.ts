export { ApiClient, ApiError } from './api';
export type { FetchLike } from './api';
export * from './chart';
export * from './dashboard';
export * from './stream';
export * from './wizard';
export * from './types';
export { App, mount } from './app';
