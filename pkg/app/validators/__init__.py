"""인자 검증 헬퍼 패키지입니다."""
