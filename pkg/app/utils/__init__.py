"""단위 변환, 설정 파서, 직렬화, 병렬 map 등 공용 유틸 함수 모음입니다."""
